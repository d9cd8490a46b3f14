#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>

#include "dnls/io.hpp"
#include "dnls/scenario.hpp"

using namespace dnls;
using nlohmann::json;

namespace {

struct Common {
    std::string config;
    std::string out;
    int window = 0;
    long long seed = -1;
    std::string scenario;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--config", c.config, "scenario config (JSON)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--window", c.window, "window half-width (sites -N..N)");
    app->add_option("--seed", c.seed, "seed for radiation-kick phases");
    app->add_option("--scenario", c.scenario, "scenario kind")
        ->check(CLI::IsMember({"standing_wave", "internal_mode_kick", "radiation_kick", "mixed_kick",
                               "contrast_single_eigenvalue", "free_decay"}));
}

ScenarioConfig resolve(const Common& c)
{
    ScenarioConfig cfg;
    if (!c.config.empty()) {
        json j = read_json(c.config);
        if (!c.scenario.empty()) j["scenario"] = c.scenario;
        cfg = ScenarioConfig::from_json(j);
    } else {
        cfg = ScenarioConfig::preset(c.scenario.empty() ? ScenarioKind::InternalModeKick
                                                        : scenario_kind_from_string(c.scenario));
    }
    if (c.window > 0) cfg.window = c.window;
    if (c.seed >= 0) cfg.seed = static_cast<unsigned long long>(c.seed);
    if (!c.out.empty()) cfg.out_dir = c.out;
    cfg.validate();
    return cfg;
}

void log_line(const std::string& s) { std::cerr << "[dnls_lab] " << s << "\n"; }

int print_report(const Report& r)
{
    for (const auto& c : r.checks) std::cout << summary_line(c) << "\n";
    if (!r.failed_stage.empty()) std::cout << "stage '" << r.failed_stage << "' failed: " << r.failure << "\n";
    std::cout << (r.all_pass() ? "all checks passed" : "some checks failed") << "\n";
    return r.all_pass() ? 0 : 1;
}

struct Setup {
    Potential q;
    GroundStateBranch branch;
    double omega0;
};

Setup setup(const ScenarioConfig& cfg)
{
    Setup s;
    s.q = make_potential(cfg.profile, cfg.eps, Lattice::symmetric(cfg.window));
    BranchConfig bc;
    bc.eta = cfg.eta;
    bc.count = cfg.count;
    s.branch = continue_branch(s.q, bc);
    s.omega0 = s.branch.E0 + 0.5 * s.branch.eta;
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ground-state stability laboratory for the lattice NLS with a septic nonlinearity"};
    app.require_subcommand(1);
    Common c;
    double time_scale = 1.0;

    auto* design = app.add_subcommand("design", "write the preset config of a scenario");
    auto* validate = app.add_subcommand("validate", "certify the spectral hypotheses (window and doubled window)");
    auto* branch = app.add_subcommand("branch", "continue the ground-state branch and save it");
    auto* linearize = app.add_subcommand("linearize", "spectral report of the linearization at omega0");
    auto* evolve_cmd = app.add_subcommand("evolve", "evolve the scenario's initial data, mass and energy series");
    auto* modulate = app.add_subcommand("modulate", "run the scenario with modulation tracking");
    auto* normalform = app.add_subcommand("normalform", "first normal-form step at omega0");
    auto* report = app.add_subcommand("report", "run the acceptance checks");
    auto* all = app.add_subcommand("all", "full scenario pipeline including the normal form");
    for (auto* s : {design, validate, branch, linearize, evolve_cmd, modulate, normalform, report, all})
        add_common(s, c);
    report->add_option("--time-scale", time_scale, "multiply every run length (quick looks use < 1)")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        const CheckOptions opts{time_scale, log_line};
        if (*report) {
            Report r = acceptance_report(opts);
            const std::filesystem::path out = c.out.empty() ? "out" : c.out;
            std::filesystem::create_directories(out);
            write_json(out / "report.json", r.to_json());
            return print_report(r);
        }

        ScenarioConfig cfg = resolve(c);
        if (*design) {
            const json j = cfg.to_json();
            if (c.out.empty()) {
                std::cout << j.dump(2) << "\n";
            } else {
                std::filesystem::create_directories(cfg.out_dir);
                write_json(cfg.out_dir / "config.json", j);
                std::cout << "wrote " << (cfg.out_dir / "config.json").string() << "\n";
            }
            return 0;
        }
        if (*validate) {
            const Potential shape = make_potential(cfg.profile, 1.0, Lattice::symmetric(cfg.window));
            auto a = validate_hypotheses(shape, cfg.eps, Lattice::symmetric(cfg.window));
            auto b = validate_hypotheses(shape, cfg.eps, Lattice::symmetric(2 * cfg.window));
            const bool stable = a.h1_ok == b.h1_ok && a.h2_ok == b.h2_ok && a.h3_ok == b.h3_ok;
            json j = {{"window", to_json(a)}, {"doubled_window", to_json(b)}, {"verdict_stable", stable}};
            std::cout << j.dump(2) << "\n";
            if (!c.out.empty()) {
                std::filesystem::create_directories(cfg.out_dir);
                write_json(cfg.out_dir / "hypotheses.json", j);
            }
            return a.all_ok() && stable ? 0 : 1;
        }
        if (*branch) {
            Setup s = setup(cfg);
            save_branch(s.branch, cfg.out_dir / "branch");
            double res = 0.0;
            for (double r : s.branch.residual) res = std::max(res, r);
            std::cout << "E0 " << format_double(s.branch.E0) << " eta " << format_double(s.branch.eta)
                      << " points " << s.branch.omegas.size() << " max residual " << res << "\n";
            return res <= 1e-12 ? 0 : 1;
        }
        if (*linearize) {
            Setup s = setup(cfg);
            LinearizationData lin = build_linearization(s.branch, s.branch.evaluate(s.omega0));
            if (!std::isfinite(s.branch.E1)) throw DomainError("no eigenvalue above the band: no internal mode");
            if (cfg.window <= 256)
                internal_mode(lin, s.branch.phi1);
            else
                internal_mode_iterative(lin, s.branch.phi1);
            json j = spectrum_report(lin);
            std::filesystem::create_directories(cfg.out_dir);
            write_json(cfg.out_dir / "spectrum.json", j);
            std::cout << j.dump(2) << "\n";
            return j["nonresonance"]["pass"].get<bool>() ? 0 : 1;
        }
        if (*evolve_cmd) {
            ScenarioConfig ec = cfg;
            ec.falsifier = false;
            ec.normal_form = false;
            return print_report(run_scenario(ec, opts));
        }
        if (*modulate) {
            ScenarioConfig mc = cfg;
            mc.normal_form = false;
            return print_report(run_scenario(mc, opts));
        }
        if (*normalform) {
            Setup s = setup(cfg);
            NormalFormContext ctx = make_normal_form_context(s.branch, s.omega0);
            NormalFormSystem sys = extract_system(base_system(ctx), 3, 1);
            StepResult st = normal_form_step(sys, ctx, 1);
            save_normal_form(cfg.out_dir / "normal_form", st.system, st.gen);
            std::cout << "lambda " << format_double(ctx.lambda()) << " max homological residual "
                      << st.gen.max_residual << " reality defect " << st.gen.reality_defect << "\n";
            return st.gen.max_residual <= 1e-10 ? 0 : 1;
        }
        if (*all) {
            ScenarioConfig ac = cfg;
            if (ac.kind == ScenarioKind::InternalModeKick || ac.kind == ScenarioKind::MixedKick) ac.normal_form = true;
            return print_report(run_scenario(ac, opts));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
