#include "dnls/scenario.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <fstream>

#include "dnls/io.hpp"

namespace dnls {

using nlohmann::json;

namespace {

struct KindName {
    ScenarioKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ScenarioKind::StandingWave, "standing_wave"},
    {ScenarioKind::InternalModeKick, "internal_mode_kick"},
    {ScenarioKind::RadiationKick, "radiation_kick"},
    {ScenarioKind::MixedKick, "mixed_kick"},
    {ScenarioKind::ContrastSingleEigenvalue, "contrast_single_eigenvalue"},
    {ScenarioKind::FreeDecay, "free_decay"},
};

CheckRecord record(const std::string& name, const std::string& anchor, double measured, const std::string& relation,
                   double tolerance, bool pass, json details = json::object())
{
    CheckRecord c;
    c.name = name;
    c.anchor = anchor;
    c.measured = measured;
    c.relation = relation;
    c.tolerance = tolerance;
    c.pass = pass;
    c.details = std::move(details);
    return c;
}

const char* kPlotScript = R"(import csv
import sys
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open(sys.argv[1] if len(sys.argv) > 1 else "trajectory.csv")))
t = [float(r["t"]) for r in rows]
fig, ax = plt.subplots(2, 2, figsize=(10, 7))
for a, key, log in [(ax[0][0], "abs_z", False), (ax[0][1], "omega", False),
                    (ax[1][0], "infdist", True), (ax[1][1], "f_wnorm", True)]:
    a.plot(t, [float(r[key]) for r in rows])
    a.set_xlabel("t")
    a.set_ylabel(key)
    if log:
        a.set_yscale("log")
fig.tight_layout()
fig.savefig("trajectory.png", dpi=120)
)";

}  // namespace

std::string to_string(ScenarioKind k)
{
    for (const auto& e : kKinds)
        if (e.kind == k) return e.name;
    return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& s)
{
    for (const auto& e : kKinds)
        if (s == e.name) return e.kind;
    throw DomainError("unknown scenario '" + s + "'");
}

ScenarioConfig ScenarioConfig::preset(ScenarioKind kind)
{
    ScenarioConfig c;
    c.kind = kind;
    switch (kind) {
    case ScenarioKind::StandingWave:
        c.window = 256;
        c.kick = 0.0;
        c.falsifier = false;
        break;
    case ScenarioKind::InternalModeKick:
        c.evolution.dt = 0.005;
        c.evolution.T = 200.0;
        c.normal_form = true;
        break;
    case ScenarioKind::RadiationKick:
        c.falsifier = false;
        break;
    case ScenarioKind::MixedKick:
        c.evolution.T = 200.0;
        c.normal_form = true;
        break;
    case ScenarioKind::ContrastSingleEigenvalue:
        c.profile = "delta";
        c.eps = -0.5;
        c.window = 640;
        c.evolution.T = 500.0;
        c.evolution.cadence = 5.0;
        break;
    case ScenarioKind::FreeDecay:
        c.window = 1280;
        c.evolution.T = 500.0;
        c.falsifier = false;
        break;
    }
    return c;
}

json ScenarioConfig::to_json() const
{
    json j = {{"profile", profile},
              {"eps", eps},
              {"window", window},
              {"count", count},
              {"scenario", dnls::to_string(kind)},
              {"kick", kick},
              {"evolution", {{"dt", evolution.dt}, {"T", evolution.T}, {"cadence", evolution.cadence}}},
              {"falsifier", falsifier},
              {"normal_form", normal_form},
              {"out_dir", out_dir.string()},
              {"seed", seed}};
    j["eta"] = eta ? json(*eta) : json(nullptr);
    return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j)
{
    if (!j.is_object()) throw DomainError("scenario config must be a JSON object");
    ScenarioConfig c = preset(scenario_kind_from_string(j.value("scenario", std::string("internal_mode_kick"))));
    c.profile = j.value("profile", c.profile);
    c.eps = j.value("eps", c.eps);
    c.window = j.value("window", c.window);
    c.count = j.value("count", c.count);
    c.kick = j.value("kick", c.kick);
    c.falsifier = j.value("falsifier", c.falsifier);
    c.normal_form = j.value("normal_form", c.normal_form);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir.string());
    if (j.contains("eta") && !j["eta"].is_null()) c.eta = j["eta"].get<double>();
    if (j.contains("evolution")) {
        const json& e = j["evolution"];
        c.evolution.dt = e.value("dt", c.evolution.dt);
        c.evolution.T = e.value("T", c.evolution.T);
        c.evolution.cadence = e.value("cadence", c.evolution.cadence);
    }
    c.validate();
    return c;
}

std::string ScenarioConfig::hash() const
{
    json j = to_json();
    j.erase("out_dir");
    return hex64(fnv1a64(j.dump()));
}

void ScenarioConfig::validate() const
{
    make_potential(profile, eps, Lattice::symmetric(16));
    if (window < 16) throw DomainError("window half-width must be at least 16");
    if (count < 2) throw DomainError("branch grid needs at least two points");
    if (eta && !(*eta > 0.0)) throw DomainError("eta must be positive");
    if (!(kick >= 0.0) || !std::isfinite(kick)) throw DomainError("kick amplitude must be non-negative");
    if (!(evolution.dt > 0.0) || evolution.dt > 0.05) throw DomainError("dt must lie in (0, 0.05]");
    if (!(evolution.T >= evolution.dt)) throw DomainError("T must be at least dt");
    if (!(evolution.cadence > 0.0)) throw DomainError("cadence must be positive");
    if (kind == ScenarioKind::FreeDecay && evolution.T < 20.0) throw DomainError("free_decay needs T >= 20");
}

bool Report::all_pass() const
{
    if (!failed_stage.empty()) return false;
    for (const auto& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

json Report::to_json() const
{
    json cs = json::array();
    for (const auto& c : checks) cs.push_back(dnls::to_json(c));
    return {{"scenario", scenario},         {"checks", cs},           {"environment", environment},
            {"config_hash", config_hash},   {"failed_stage", failed_stage}, {"failure", failure},
            {"all_pass", all_pass()}};
}

json environment_fingerprint()
{
    return {{"compiler", __VERSION__},
            {"cplusplus", long(__cplusplus)},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"omp_threads", kernels::available_threads()}};
}

void write_modulation_csv(const std::filesystem::path& path, const ModulationTrajectory& mt)
{
    CsvWriter w(path, {"t", "omega", "gamma", "abs_z", "arg_z", "f_wnorm", "r_norm", "infdist"});
    for (const auto& s : mt.samples)
        w.row({s.t, s.omega, s.gamma, std::abs(s.z), std::arg(s.z), s.f_wnorm, s.r_norm, s.infdist});
}

void save_normal_form(const std::filesystem::path& dir, const NormalFormSystem& sys, const Generators& gen)
{
    std::filesystem::create_directories(dir);
    auto scalars = [](const PolyScalar& p) {
        json a = json::array();
        for (const auto& [mn, v] : p.coeff) a.push_back({mn.first, mn.second, v.real(), v.imag()});
        return a;
    };
    auto fields = [&](const PolyField& p, const std::string& stem) {
        json a = json::array();
        for (const auto& [mn, v] : p.coeff) {
            const std::string base = stem + "_" + std::to_string(mn.first) + "_" + std::to_string(mn.second);
            const int n = int(v.size()) / 2;
            const Lattice lat = Lattice::symmetric((n - 1) / 2);
            write_field(dir / (base + "_top.txt"), LatticeField(lat, v.head(n)), {{"component", "top"}});
            write_field(dir / (base + "_bottom.txt"), LatticeField(lat, v.tail(n)), {{"component", "bottom"}});
            a.push_back({{"m", mn.first},
                         {"n", mn.second},
                         {"files", {base + "_top.txt", base + "_bottom.txt"}},
                         {"norm", v.norm()}});
        }
        return a;
    };
    json j = {{"L", sys.L},
              {"ell", sys.ell},
              {"extraction_residual", sys.extraction_residual},
              {"a", scalars(sys.a)},
              {"b", scalars(sys.b)},
              {"c", scalars(sys.c)},
              {"A", fields(sys.A, "A")},
              {"generators",
               {{"degree", gen.degree},
                {"alpha", scalars(gen.alpha)},
                {"beta", scalars(gen.beta)},
                {"G", fields(gen.G, "G")},
                {"max_residual", gen.max_residual},
                {"reality_defect", gen.reality_defect}}}};
    write_json(dir / "normal_form.json", j);
}

Report acceptance_report(const CheckOptions& o)
{
    Report r;
    r.scenario = "acceptance";
    r.environment = environment_fingerprint();
    r.config_hash = hex64(fnv1a64("acceptance:" + format_double(o.time_scale)));
    r.checks = run_all_checks(o);
    return r;
}

Report run_scenario(const ScenarioConfig& cfg, const CheckOptions& o)
{
    Report rep;
    rep.scenario = to_string(cfg.kind);
    rep.environment = environment_fingerprint();
    rep.config_hash = cfg.hash();
    std::string stage = "config";
    auto log = [&](const std::string& s) {
        if (o.log) o.log(s);
    };
    try {
        cfg.validate();
        std::filesystem::create_directories(cfg.out_dir);
        write_json(cfg.out_dir / "config.json", cfg.to_json());
        const Lattice lat = Lattice::symmetric(cfg.window);
        const Potential q = make_potential(cfg.profile, cfg.eps, lat);
        const bool contrast = cfg.kind == ScenarioKind::ContrastSingleEigenvalue;

        stage = "validate";
        log("validating hypotheses");
        {
            const Potential shape = make_potential(cfg.profile, 1.0, lat);
            auto h = validate_hypotheses(shape, cfg.eps, lat);
            write_json(cfg.out_dir / "hypotheses.json", dnls::to_json(h));
            if (contrast) {
                const bool single = h.count_below_zero == 1 && h.count_above_four == 0 && h.h2_ok;
                rep.checks.push_back(record("single_eigenvalue", "exactly one discrete eigenvalue, below the band",
                                            h.count_above_four, "==", 0, single,
                                            {{"below_zero", h.count_below_zero}}));
            } else {
                rep.checks.push_back(record("hypotheses", "decay, no endpoint resonance, two discrete eigenvalues",
                                            double(h.all_ok()), "==", 1, h.all_ok(),
                                            {{"below_zero", h.count_below_zero},
                                             {"above_four", h.count_above_four},
                                             {"abs_W0", std::abs(h.W0)},
                                             {"abs_Wpi", std::abs(h.Wpi)}}));
            }
        }
        Propagator prop(q);

        if (cfg.kind == ScenarioKind::FreeDecay) {
            stage = "evolve";
            log("linear decay fit");
            const auto grid = log_spaced(10.0, cfg.evolution.T, 12);
            auto fit = decay_exponent(prop, prop.continuous_part(delta_field<cplx>(lat, 0)), grid);
            CsvWriter w(cfg.out_dir / "decay.csv", {"t", "sup_norm"});
            for (size_t i = 0; i < fit.times.size(); ++i) w.row({fit.times[i], fit.sup_norms[i]});
            const double dev = std::abs(fit.exponent + 1.0 / 3.0);
            rep.checks.push_back(record("decay_exponent", "l1 -> l_inf decay t^{-1/3} on the continuous subspace",
                                        dev, "<=", 0.07, dev <= 0.07,
                                        {{"exponent", fit.exponent}, {"boundary_mass", fit.max_boundary_mass}}));
            write_json(cfg.out_dir / "summary.json", rep.to_json());
            return rep;
        }

        stage = "branch";
        log("ground-state branch");
        BranchConfig bc;
        bc.eta = cfg.eta;
        bc.count = cfg.count;
        const GroundStateBranch br = continue_branch(q, bc);
        double newton = 0.0;
        for (double r : br.residual) newton = std::max(newton, r);
        rep.checks.push_back(record("branch_newton", "stationary equation solved along the branch", newton, "<=",
                                    1e-12, newton <= 1e-12));
        const double w0 = br.E0 + 0.5 * br.eta;
        const GroundStatePoint pt = br.evaluate(w0);

        stage = "linearize";
        std::optional<LinearizationData> lin;
        if (std::isfinite(br.E1)) {
            log("linearization and internal mode");
            lin = build_linearization(br, pt);
            internal_mode_iterative(*lin, br.phi1);
            const auto nr = nonresonance_certificate(*lin);
            rep.checks.push_back(record("internal_mode", "isolated internal mode, multiples of lambda off the band",
                                        lin->eigen_residual, "<=", 1e-10,
                                        lin->eigen_residual <= 1e-10 && nr.margin > 0.0,
                                        {{"lambda", lin->lambda}, {"nonresonance_margin", nr.margin}}));
            write_json(cfg.out_dir / "linearization.json",
                       {{"omega", lin->omega}, {"lambda", lin->lambda}, {"E0", br.E0}, {"E1", br.E1},
                        {"eigen_residual", lin->eigen_residual}, {"mirror_residual", lin->mirror_residual}});
        } else if (!contrast) {
            throw DomainError("scenario needs an eigenvalue above the band");
        }

        stage = "initial_data";
        LatticeField u0(lat, pt.phi.values.cast<cplx>());
        const bool has_mode_kick =
            cfg.kind == ScenarioKind::InternalModeKick || cfg.kind == ScenarioKind::MixedKick;
        const bool has_radiation = cfg.kind == ScenarioKind::RadiationKick || cfg.kind == ScenarioKind::MixedKick;
        if (has_mode_kick) u0 = internal_mode_kick(pt, *lin, cfg.kick);
        if (has_radiation) u0.values += radiation_packet(*lin, cfg.kick, 0.0, 10.0, 1.2, cfg.seed).values;
        if (contrast)
            for (int i = 0; i < lat.size(); ++i) {
                const double x = lat.site(i) / 4.0;
                u0.values[i] += cfg.kick * std::exp(-x * x);
            }

        std::optional<NormalFormContext> ctx;
        std::optional<StepResult> step;
        std::optional<FieldCorrections> fc;
        TrackOptions to;
        to.falsifier = cfg.falsifier;
        if (cfg.normal_form && lin) {
            stage = "normal_form";
            log("normal form at omega0");
            ctx = make_normal_form_context(br, w0);
            NormalFormSystem sys = extract_system(base_system(*ctx), 3, 1);
            step = normal_form_step(sys, *ctx, 1);
            fc = leading_field_corrections(*ctx);
            save_normal_form(cfg.out_dir / "normal_form", step->system, step->gen);
            to.f_functionals = fc->functionals();
            rep.checks.push_back(record("homological_residuals", "every homological solve re-applied",
                                        std::max({step->gen.max_residual, fc->C10.residual, fc->C01.residual,
                                                  fc->Phi10.residual, fc->Phi01.residual}),
                                        "<=", 1e-10,
                                        std::max({step->gen.max_residual, fc->C10.residual, fc->C01.residual,
                                                  fc->Phi10.residual, fc->Phi01.residual}) <= 1e-10));
        }

        stage = "evolve";
        log("evolving to T = " + format_double(cfg.evolution.T));
        EvolutionConfig ec = cfg.evolution;
        ec.store_snapshots = false;
        auto run = track(q, prop, u0, ec, br, w0, 0.0, to);
        const auto& mt = run.modulation;
        write_modulation_csv(cfg.out_dir / "trajectory.csv", mt);
        {
            CsvWriter w(cfg.out_dir / "evolution.csv", {"t", "mass", "energy"});
            for (size_t i = 0; i < run.trajectory.times.size(); ++i)
                w.row({run.trajectory.times[i], run.trajectory.mass[i], run.trajectory.energy[i]});
        }
        std::ofstream(cfg.out_dir / "plot.py") << kPlotScript;

        stage = "diagnostics";
        rep.checks.push_back(record("tracking", "decomposition stays inside the tube", double(mt.bisections), ">=",
                                    0, mt.failure.empty() && !mt.tube_exit, {{"failure", mt.failure}}));
        const double dm = run.trajectory.max_relative_mass_drift(), de = run.trajectory.max_relative_energy_drift();
        rep.checks.push_back(record("conservation", "mass and energy conservation of the splitting", de, "<=", 1e-6,
                                    dm <= 1e-10 && de <= 1e-6, {{"mass_drift", dm}, {"mass_tolerance", 1e-10}}));
        if (!mt.failure.empty()) throw NumericalFailure(mt.failure);
        rep.checks.push_back(record("orthogonality", "orthogonality constraints after Newton", mt.max_orthogonality,
                                    "<=", 1e-10, mt.max_orthogonality <= 1e-10));

        if (cfg.kind == ScenarioKind::StandingWave) {
            const double res = ground_state_residual(q, w0, pt.phi).values.norm() / pt.phi.values.norm();
            double dev = 0.0, dw = 0.0;
            for (const auto& s : mt.samples) {
                dev = std::max(dev, s.r_norm / pt.phi.values.norm());
                dw = std::max(dw, std::abs(s.omega - w0));
            }
            rep.checks.push_back(record("stationary_residual", "standing wave solves the stationary equation", res,
                                        "<=", 1e-12, res <= 1e-12));
            rep.checks.push_back(record("orbit_deviation", "standing wave stays on its orbit (splitting error only)",
                                        dev, "<=", 1e-6, dev <= 1e-6, {{"omega_deviation", dw}}));
        }
        if (has_mode_kick) {
            const auto pm = persistence_metric(mt);
            rep.checks.push_back(record("persistence", "internal-mode amplitude persists", pm.min_ratio, ">=", 0.5,
                                        pm.min_ratio >= 0.5,
                                        {{"z_sq_drift", pm.drift}, {"z_sq_peak_to_peak", pm.oscillation}}));
            if (cfg.falsifier && cfg.evolution.T > 50.0) {
                const int n = lat.size();
                const Eigen::VectorXd w = weight_vector(lat, -2.0);
                const double bound = 0.25 * std::abs(mt.samples.front().z) *
                                     (w.array() * lin->xi.head(n).real().array()).matrix().norm();
                double lo = std::numeric_limits<double>::infinity();
                for (const auto& s : mt.samples)
                    if (s.t >= 50.0) lo = std::min(lo, s.infdist);
                rep.checks.push_back(record("falsifier_lower_bound", "distance to the ground-state family stays bounded below",
                                            lo, ">=", bound, lo >= bound));
            }
            if (step) {
                auto ts = transform_trajectory(mt, step->gen, *fc);
                CsvWriter w(cfg.out_dir / "transformed.csv", {"t", "abs_zeta", "arg_zeta", "varpi"});
                for (size_t i = 0; i < ts.t.size(); ++i)
                    w.row({ts.t[i], std::abs(ts.zeta[i]), std::arg(ts.zeta[i]), ts.varpi[i]});
                std::vector<double> om;
                for (const auto& s : mt.samples) om.push_back(s.omega);
                const double tvw = total_variation(om), tvv = total_variation(ts.varpi);
                rep.checks.push_back(record("varpi_variation", "normal-form frequency varies less than omega", tvv,
                                            "<=", tvw, tvv <= tvw));
                if (cfg.kind == ScenarioKind::InternalModeKick) {
                    const double zeta0 = std::norm(ts.zeta.front());
                    double zd = 0.0;
                    for (const auto& x : ts.zeta) zd = std::max(zd, std::abs(std::norm(x) - zeta0));
                    rep.checks.push_back(record("normal_form_flattening", "|zeta|^2 drifts less than |z|^2 oscillates",
                                                zd, "<", pm.drift, zd < pm.drift));
                }
            }
        }
        if (cfg.kind == ScenarioKind::RadiationKick) {
            double zmax = 0.0;
            for (const auto& x : mt.samples) zmax = std::max(zmax, std::abs(x.z));
            rep.checks.push_back(record("radiation_leaves_mode_unexcited", "radiation does not feed the internal mode",
                                        zmax, "<=", 1e-4, zmax <= 1e-4));
            const double ratio = mt.samples.back().f_wnorm / mt.samples.front().f_wnorm;
            rep.checks.push_back(record("radiation_local_decay", "weighted radiation norm decays",
                                        ratio, "<=", 0.5, ratio <= 0.5,
                                        {{"f_wnorm_start", mt.samples.front().f_wnorm},
                                         {"f_wnorm_end", mt.samples.back().f_wnorm}}));
        }
        if (contrast && cfg.falsifier) {
            const double t_early = 0.1 * cfg.evolution.T;
            double early = NAN, best = 1e300;
            for (const auto& s : mt.samples)
                if (std::abs(s.t - t_early) < best) {
                    best = std::abs(s.t - t_early);
                    early = s.infdist;
                }
            const double ratio = mt.samples.back().infdist / early;
            rep.checks.push_back(record("falsifier_decay", "distance to the family decays without an internal mode",
                                        ratio, "<=", 0.5, ratio <= 0.5,
                                        {{"infdist_early", early}, {"infdist_end", mt.samples.back().infdist}}));
        }
    } catch (const std::exception& e) {
        rep.failed_stage = stage;
        rep.failure = e.what();
    }
    try {
        write_json(cfg.out_dir / "summary.json", rep.to_json());
    } catch (const std::exception&) {
    }
    return rep;
}

}  // namespace dnls
