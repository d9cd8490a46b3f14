#include "dnls/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "dnls/io.hpp"
#include "dnls/scattering.hpp"

namespace dnls {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void say(const CheckOptions& o, const std::string& msg)
{
    if (o.log) o.log(msg);
}

CheckRecord guarded(int id, const std::string& name, const std::string& anchor,
                    const std::function<void(CheckRecord&)>& body)
{
    CheckRecord c;
    c.id = id;
    c.name = name;
    c.anchor = anchor;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.error = e.what();
    }
    c.seconds = seconds_since(t0);
    return c;
}

struct TwoEigenvalueSetup {
    Potential q;
    GroundStateBranch branch;
    double omega0 = 0.0;
    GroundStatePoint point;
    LinearizationData lin;
};

TwoEigenvalueSetup two_eigenvalue_setup(int half)
{
    TwoEigenvalueSetup s;
    s.q = make_potential("qstar", 0.3, Lattice::symmetric(half));
    s.branch = continue_branch(s.q);
    s.omega0 = s.branch.E0 + 0.5 * s.branch.eta;
    s.point = s.branch.evaluate(s.omega0);
    s.lin = build_linearization(s.branch, s.point);
    internal_mode_iterative(s.lin, s.branch.phi1);
    return s;
}

LatticeField mixed_kick(const TwoEigenvalueSetup& s, double eps, unsigned long long seed)
{
    LatticeField u = internal_mode_kick(s.point, s.lin, eps);
    u.values += radiation_packet(s.lin, eps, 0.0, 10.0, 1.2, seed).values;
    return u;
}

double unwrap_slope(const std::vector<double>& t, const std::vector<cplx>& z)
{
    std::vector<double> ph;
    double prev = 0.0, offset = 0.0;
    for (size_t i = 0; i < z.size(); ++i) {
        double a = std::arg(z[i]);
        if (i > 0) {
            while (a + offset - prev > std::numbers::pi) offset -= 2 * std::numbers::pi;
            while (a + offset - prev < -std::numbers::pi) offset += 2 * std::numbers::pi;
        }
        prev = a + offset;
        ph.push_back(prev);
    }
    const double n = double(t.size());
    double st = 0, sp = 0, stt = 0, stp = 0;
    for (size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sp += ph[i];
        stt += t[i] * t[i];
        stp += t[i] * ph[i];
    }
    return (n * stp - st * sp) / (n * stt - st * st);
}

}  // namespace

json to_json(const CheckRecord& c)
{
    return {{"id", c.id},           {"name", c.name},       {"anchor", c.anchor},   {"measured", c.measured},
            {"tolerance", c.tolerance}, {"relation", c.relation}, {"pass", c.pass}, {"seconds", c.seconds},
            {"error", c.error},     {"details", c.details}};
}

std::string summary_line(const CheckRecord& c)
{
    char label[32];
    if (c.id > 0)
        std::snprintf(label, sizeof label, "criterion %2d", c.id);
    else
        std::snprintf(label, sizeof label, "check");
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s %s %-28s measured %.3e %s %.3e (%.1f s)%s%s", c.pass ? "PASS" : "FAIL", label,
                  c.name.c_str(), c.measured, c.relation.c_str(), c.tolerance, c.seconds,
                  c.error.empty() ? "" : " error: ", c.error.c_str());
    return buf;
}

LatticeField internal_mode_kick(const GroundStatePoint& p, const LinearizationData& lin, double eps)
{
    const int n = p.phi.size();
    LatticeField u(p.phi.lattice, p.phi.values.cast<cplx>());
    u.values += eps * (lin.xi.head(n) + lin.xi.tail(n));
    return u;
}

LatticeField radiation_packet(const LinearizationData& lin, double amp, double center, double width, double k0,
                              unsigned long long seed)
{
    if (!(width > 0.0)) throw DomainError("packet width must be positive");
    const Lattice& lat = lin.lattice();
    const int n = lat.size();
    std::mt19937_64 rng(seed);
    const double psi = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double x = (lat.site(i) - center) / width;
        v[i] = amp * std::exp(-x * x) * std::polar(1.0, k0 * lat.site(i) + psi);
    }
    Eigen::VectorXcd R(2 * n);
    R << v, v.conjugate();
    R = lin.project_c(R);
    return LatticeField(lat, R.head(n));
}

// ---------------------------------------------------------------- 1

CheckRecord check_free_kernel(const CheckOptions& o)
{
    return guarded(1, "free_kernel", "free lattice flow from delta_0 equals the Bessel kernel", [&](CheckRecord& c) {
        say(o, "free kernel");
        const Lattice lat = Lattice::symmetric(512);
        Propagator p(make_potential("zero", 1.0, lat));
        const double t = 10.0;
        LatticeField u = p.apply(t, delta_field<cplx>(lat, 0));
        double err = 0.0;
        for (int i = 0; i < lat.size(); ++i) {
            const int a = std::abs(lat.site(i));
            const cplx ia = std::pow(cplx(0.0, 1.0), a);
            const cplx ref = std::polar(1.0, -2.0 * t) * ia * std::cyl_bessel_j(double(a), 2.0 * t);
            err = std::max(err, std::abs(u.values[i] - ref));
        }
        c.measured = err;
        c.tolerance = 1e-8;
        c.relation = "<=";
        c.pass = err <= c.tolerance;
        c.details = {{"t", t}, {"window", lat.size()}};
    });
}

// ---------------------------------------------------------------- 2

CheckRecord check_dispersive_decay(const CheckOptions& o)
{
    return guarded(2, "dispersive_decay", "l1 -> l_inf decay rate t^{-1/3} of the linear flows", [&](CheckRecord& c) {
        const Lattice lat = Lattice::symmetric(1280);
        const auto grid = log_spaced(10.0, 500.0, 12);
        say(o, "dispersive decay: free flow");
        Propagator pf(make_potential("zero", 1.0, lat));
        auto ff = decay_exponent(pf, delta_field<cplx>(lat, 0), grid);
        say(o, "dispersive decay: 0.3 q* on the continuous subspace");
        Propagator ph(make_potential("qstar", 0.3, lat));
        auto fh = decay_exponent(ph, ph.continuous_part(delta_field<cplx>(lat, 0)), grid);
        const double df = std::abs(ff.exponent + 1.0 / 3.0), dh = std::abs(fh.exponent + 1.0 / 3.0);
        c.measured = std::max(df / 0.05, dh / 0.07);
        c.tolerance = 1.0;
        c.relation = "<=";
        c.pass = df <= 0.05 && dh <= 0.07;
        c.details = {{"free_exponent", ff.exponent}, {"free_tolerance", 0.05},
                     {"H_exponent", fh.exponent},    {"H_tolerance", 0.07},
                     {"free_boundary_mass", ff.max_boundary_mass}, {"H_boundary_mass", fh.max_boundary_mass},
                     {"measured_is", "max(|e_free + 1/3| / 0.05, |e_H + 1/3| / 0.07)"}};
    });
}

// ---------------------------------------------------------------- 3

CheckRecord check_zero_energy_limit(const CheckOptions& o)
{
    return guarded(3, "zero_energy_limit", "free resolvent pairing limit at z -> 0- for zero-sum q",
                   [&](CheckRecord& c) {
                       say(o, "zero-energy limit");
                       double worst = 0.0;
                       json rows = json::array();
                       for (const char* prof : {"qstar", "dipole", "wide"}) {
                           Potential q = make_potential(prof, 1.0, Lattice::symmetric(32));
                           const double lim = lemma_a2_limit(q, default_a2_sequence());
                           const double mom = moment_functional(q);
                           const double d = std::abs(lim + 0.5 * mom);
                           worst = std::max(worst, d);
                           rows.push_back({{"profile", prof}, {"limit", lim}, {"moment", mom}, {"defect", d}});
                       }
                       c.measured = worst;
                       c.tolerance = 1e-6;
                       c.relation = "<=";
                       c.pass = worst <= c.tolerance;
                       c.details = {{"potentials", rows}};
                   });
}

// ---------------------------------------------------------------- 4

CheckRecord check_hypotheses(const CheckOptions& o)
{
    return guarded(4, "hypotheses", "two discrete eigenvalues, no endpoint resonance, small-coupling E0",
                   [&](CheckRecord& c) {
                       Potential shape = make_potential("qstar", 1.0, Lattice::symmetric(128));
                       bool ok = true;
                       double e0_rel = std::numeric_limits<double>::quiet_NaN();
                       json rows = json::array();
                       for (double eps : {0.1, 0.2, 0.3, 0.4}) {
                           say(o, "hypotheses at eps = " + format_double(eps));
                           auto rep = validate_hypotheses(shape, eps);
                           const bool counts = rep.count_below_zero == 1 && rep.count_above_four == 1;
                           const bool res = std::abs(rep.W0) > 1e-6 && std::abs(rep.Wpi) > 1e-6;
                           ok = ok && counts && res;
                           json row = {{"eps", eps},
                                       {"below_zero", rep.count_below_zero},
                                       {"above_four", rep.count_above_four},
                                       {"abs_W0", std::abs(rep.W0)},
                                       {"abs_Wpi", std::abs(rep.Wpi)},
                                       {"E0", rep.E0},
                                       {"E1", rep.E1},
                                       {"window", rep.window.size()}};
                           if (rep.prediction) row["E0_pred"] = rep.prediction->E0_pred;
                           if (eps == 0.3) {
                               if (!rep.prediction) throw NumericalFailure("no small-coupling prediction");
                               e0_rel = std::abs(rep.E0 - rep.prediction->E0_pred) / rep.prediction->E0_pred;
                           }
                           rows.push_back(row);
                       }
                       c.measured = e0_rel;
                       c.tolerance = 0.3;
                       c.relation = "<=";
                       c.pass = ok && e0_rel <= 0.3;
                       c.details = {{"per_eps", rows},
                                    {"counts_and_resonance_ok", ok},
                                    {"measured_is", "|E0 - E0_pred| / E0_pred at eps = 0.3"}};
                   });
}

// ---------------------------------------------------------------- 5

CheckRecord check_branch(const CheckOptions& o)
{
    return guarded(5, "ground_state_branch", "bifurcating ground-state branch and its omega-derivative",
                   [&](CheckRecord& c) {
                       say(o, "ground-state branch");
                       Potential q = make_potential("qstar", 0.3, Lattice::symmetric(512));
                       GroundStateBranch def = continue_branch(q);
                       BranchConfig cfg;
                       cfg.eta = def.eta;
                       for (int k = 3; k >= 0; --k) cfg.omegas.push_back(def.E0 + def.eta * std::ldexp(1.0, -k));
                       GroundStateBranch dy = continue_branch(q, cfg);
                       double newton = 0.0, implicit = 0.0;
                       for (const auto* b : {&def, &dy}) {
                           for (double r : b->residual) newton = std::max(newton, r);
                           for (double r : b->implicit_residual) implicit = std::max(implicit, r);
                       }
                       std::vector<double> ratios;
                       for (size_t k = 0; k < dy.omegas.size(); ++k) {
                           const double w = dy.omegas[k];
                           const RealField seed = bifurcation_seed(dy.phi0, dy.E0, w);
                           const double cw = seed.values.norm() / dy.phi0.values.norm();
                           ratios.push_back((dy.phi[k].values / cw - dy.phi0.values).norm() / (w - dy.E0));
                       }
                       const double spread = *std::max_element(ratios.begin(), ratios.end()) /
                                             *std::min_element(ratios.begin(), ratios.end());
                       c.measured = newton;
                       c.tolerance = 1e-12;
                       c.relation = "<=";
                       c.pass = newton <= 1e-12 && implicit <= 1e-10 && spread <= 2.0;
                       c.details = {{"newton_residual_max", newton},
                                    {"implicit_residual_max", implicit},
                                    {"implicit_tolerance", 1e-10},
                                    {"scaling_ratios", ratios},
                                    {"scaling_spread", spread},
                                    {"scaling_tolerance", 2.0},
                                    {"E0", def.E0},
                                    {"eta", def.eta}};
                   });
}

// ---------------------------------------------------------------- 6

CheckRecord check_linearization(const CheckOptions& o)
{
    return guarded(6, "linearization", "generalized kernel, internal mode, nonresonance along the branch",
                   [&](CheckRecord& c) {
                       say(o, "linearization along the branch");
                       Potential q = make_potential("qstar", 0.3, Lattice::symmetric(256));
                       GroundStateBranch br = continue_branch(q);
                       double kernel = 0.0, pairing = 0.0, min_margin = std::numeric_limits<double>::infinity();
                       std::vector<double> cs, lambdas;
                       for (size_t k = 0; k < br.omegas.size(); ++k) {
                           LinearizationData lin = build_linearization(br, br.at_grid(k));
                           kernel = std::max(kernel, generalized_kernel(lin).kernel_residual);
                           internal_mode_iterative(lin, br.phi1);
                           const Eigen::VectorXcd s3 = sigma3(lin.xi);
                           pairing = std::max(pairing, std::abs(s3.dot(lin.xi) - 1.0));
                           cs.push_back(std::abs(lin.lambda - br.E1 - lin.omega) / (lin.omega - br.E0));
                           lambdas.push_back(lin.lambda);
                           min_margin = std::min(min_margin, nonresonance_certificate(lin).margin);
                       }
                       const double spread =
                           *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
                       c.measured = kernel;
                       c.tolerance = 1e-9;
                       c.relation = "<=";
                       c.pass = kernel <= 1e-9 && pairing <= 1e-10 && spread <= 2.0 && min_margin > 0.0;
                       c.details = {{"kernel_residual_max", kernel},  {"pairing_defect_max", pairing},
                                    {"pairing_tolerance", 1e-10},     {"C_values", cs},
                                    {"C_spread", spread},             {"C_spread_tolerance", 2.0},
                                    {"nonresonance_margin_min", min_margin}, {"lambda", lambdas}};
                   });
}

// ---------------------------------------------------------------- 7

CheckRecord check_conservation(const CheckOptions& o)
{
    return guarded(7, "conservation", "mass and energy conservation, second-order splitting", [&](CheckRecord& c) {
        say(o, "conservation: mixed kick");
        auto s = two_eigenvalue_setup(512);
        const LatticeField u0 = mixed_kick(s, 1e-3, 1);
        Propagator p(s.q);
        EvolutionConfig cfg;
        cfg.dt = 1e-2;
        cfg.T = 100.0 * o.time_scale;
        cfg.cadence = 1.0;
        cfg.store_snapshots = false;
        Trajectory tr = evolve(s.q, p, u0, cfg);
        const double dm = tr.max_relative_mass_drift(), de = tr.max_relative_energy_drift();

        say(o, "conservation: splitting order");
        EvolutionConfig sc = cfg;
        sc.T = 1.0;
        sc.store_snapshots = true;
        sc.cadence = 1.0;
        auto final_state = [&](double h) {
            sc.dt = h;
            return evolve(s.q, p, u0, sc).snapshots.back().values;
        };
        const Eigen::VectorXcd ref = final_state(0.02 / 32.0);
        const double e1 = (final_state(0.02) - ref).norm(), e2 = (final_state(0.01) - ref).norm();
        const double ratio = e1 / e2;
        c.measured = std::max(dm, de);
        c.tolerance = 1e-8;
        c.relation = "<=";
        c.pass = c.measured <= 1e-8 && ratio >= 3.5 && ratio <= 4.5;
        c.details = {{"mass_drift", dm},      {"energy_drift", de},       {"order_ratio", ratio},
                     {"order_ratio_range", {3.5, 4.5}}, {"error_dt_0.02", e1}, {"error_dt_0.01", e2},
                     {"T", cfg.T},            {"kick", 1e-3}};
    });
}

// ---------------------------------------------------------------- 8

CheckRecord check_modulation(const CheckOptions& o)
{
    return guarded(8, "modulation", "orthogonality constraints and the modulation equations", [&](CheckRecord& c) {
        say(o, "modulation tracking");
        auto s = two_eigenvalue_setup(256);
        const LatticeField u0 = internal_mode_kick(s.point, s.lin, 1e-2);
        Propagator p(s.q);
        EvolutionConfig cfg;
        cfg.dt = 0.005;
        cfg.T = 20.0 * o.time_scale;
        cfg.cadence = 0.02;
        cfg.store_snapshots = false;
        TrackOptions to;
        to.falsifier = false;
        auto run = track(s.q, p, u0, cfg, s.branch, s.omega0, 0.0, to);
        const auto& mt = run.modulation;
        if (!mt.failure.empty()) throw NumericalFailure("tracking failed: " + mt.failure);

        std::vector<double> t, w, th;
        std::vector<cplx> z;
        for (const auto& x : mt.samples) {
            t.push_back(x.t);
            w.push_back(x.omega);
            th.push_back(x.theta);
            z.push_back(x.z);
        }
        const auto dw = centered_derivative(t, w), dth = centered_derivative(t, th);
        double ew = 0, mw = 0, eg = 0, mg = 0;
        for (size_t i = 2; i + 2 < t.size(); ++i) {
            ew = std::max(ew, std::abs(dw[i] - mt.samples[i].omega_dot));
            mw = std::max(mw, std::abs(mt.samples[i].omega_dot));
            eg = std::max(eg, std::abs(dth[i] - w[i] - mt.samples[i].gamma_dot));
            mg = std::max(mg, std::abs(mt.samples[i].gamma_dot));
        }
        const double rel = std::max(ew / mw, eg / mg);

        // Gauge covariance: e^{i kappa} u decomposes with theta + kappa and the same (omega, r).
        const double kappa = 0.7;
        auto a = decompose(u0, s.branch, s.omega0, 0.0);
        LatticeField ur = u0;
        ur.values *= std::polar(1.0, kappa);
        auto b = decompose(ur, s.branch, s.omega0, kappa);
        const double gauge = std::max({std::abs(a.omega - b.omega), std::abs(b.theta - a.theta - kappa),
                                       (a.r.values - b.r.values).norm() / u0.values.norm()});

        const double slope = unwrap_slope(t, z);
        c.measured = rel;
        c.tolerance = 1e-3;
        c.relation = "<=";
        c.pass = mt.max_orthogonality <= 1e-10 && rel <= 1e-3 && gauge <= 1e-10;
        c.details = {{"orthogonality_max", mt.max_orthogonality},
                     {"orthogonality_tolerance", 1e-10},
                     {"omega_dot_rel_error", ew / mw},
                     {"gamma_dot_rel_error", eg / mg},
                     {"gauge_defect", gauge},
                     {"gauge_tolerance", 1e-10},
                     {"reconstruction_max", mt.max_reconstruction},
                     {"arg_z_slope", slope},
                     {"minus_lambda", -s.lin.lambda},
                     {"slope_rel_dev", std::abs(slope + s.lin.lambda) / s.lin.lambda},
                     {"samples", mt.samples.size()}};
    });
}

// ---------------------------------------------------------------- 9, 10

PersistenceRun persistence_run(const CheckOptions& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    PersistenceRun run;
    say(o, "persistence: branch and normal form");
    Potential q = make_potential("qstar", 0.3, Lattice::symmetric(run.half));
    GroundStateBranch br = continue_branch(q);
    run.omega0 = br.E0 + 0.5 * br.eta;
    NormalFormContext ctx = make_normal_form_context(br, run.omega0);
    NormalFormSystem sys = extract_system(base_system(ctx), 3, 1);
    StepResult st = normal_form_step(sys, ctx, 1);
    FieldCorrections fc = leading_field_corrections(ctx);

    const LatticeField u0 = internal_mode_kick(ctx.lin.point, ctx.lin, run.eps);
    Propagator p(q);
    EvolutionConfig cfg;
    cfg.dt = 0.005;
    cfg.T = 2000.0 * o.time_scale;
    cfg.cadence = 0.5;
    cfg.store_snapshots = false;
    TrackOptions to;
    to.f_functionals = fc.functionals();
    say(o, "persistence: evolving to T = " + format_double(cfg.T));
    auto tracked = track(q, p, u0, cfg, br, run.omega0, 0.0, to);
    run.modulation = std::move(tracked.modulation);
    if (run.modulation.failure.empty()) run.transformed = transform_trajectory(run.modulation, st.gen, fc);

    const Lattice& lat = q.lattice();
    const int n = lat.size();
    const Eigen::VectorXd w = weight_vector(lat, -2.0);
    const double xi1 = (w.array() * ctx.lin.xi.head(n).real().array()).matrix().norm();
    if (!run.modulation.samples.empty())
        run.zeta_bound = 0.25 * std::abs(run.modulation.samples.front().z) * xi1;
    run.seconds = seconds_since(t0);
    return run;
}

CheckRecord check_persistence(const PersistenceRun& run)
{
    CheckRecord c = guarded(9, "internal_mode_persistence", "internal-mode amplitude persists; normal form flattens |z|^2",
                   [&](CheckRecord& c) {
                       const auto& mt = run.modulation;
                       if (!mt.failure.empty()) throw NumericalFailure("tracking failed: " + mt.failure);
                       const auto pm = persistence_metric(mt);
                       const auto& zs = run.transformed.zeta;
                       if (zs.size() != mt.samples.size()) throw NumericalFailure("transformed series missing");
                       const double zeta0 = std::norm(zs.front());
                       double zdrift = 0.0;
                       for (const auto& x : zs) zdrift = std::max(zdrift, std::abs(std::norm(x) - zeta0));
                       c.measured = zdrift / pm.drift;
                       c.tolerance = 1.0;
                       c.relation = "<";
                       c.pass = pm.min_ratio >= 0.5 && zdrift < pm.drift;
                       c.details = {{"min_ratio", pm.min_ratio},
                                    {"min_ratio_tolerance", 0.5},
                                    {"zeta_sq_drift", zdrift},
                                    {"z_sq_oscillation", pm.drift},
                                    {"z_sq_peak_to_peak", pm.oscillation},
                                    {"T", mt.samples.back().t},
                                    {"eps", run.eps},
                                    {"run_seconds", run.seconds},
                                    {"measured_is", "max||zeta|^2 - |zeta(0)|^2| / max||z|^2 - |z(0)|^2|"}};
                   });
    c.seconds += run.seconds;
    return c;
}

CheckRecord check_falsifier(const PersistenceRun& run, const CheckOptions& o)
{
    return guarded(10, "falsifier_dichotomy", "tube lower bound with two eigenvalues, decay with one",
                   [&](CheckRecord& c) {
                       const auto& mt = run.modulation;
                       if (!mt.failure.empty()) throw NumericalFailure("tracking failed: " + mt.failure);
                       const double t_transient = 50.0 * o.time_scale;
                       double lo = std::numeric_limits<double>::infinity();
                       int escaped = 0;
                       for (const auto& s : mt.samples) {
                           if (s.t < t_transient) continue;
                           lo = std::min(lo, s.infdist);
                           escaped += s.infdist_escaped;
                       }
                       const bool two_ok = lo >= run.zeta_bound && escaped == 0;

                       say(o, "falsifier: single-eigenvalue contrast");
                       Potential q = make_potential("delta", -0.5, Lattice::symmetric(640));
                       GroundStateBranch br = continue_branch(q);
                       const double w0 = br.E0 + 0.5 * br.eta;
                       const GroundStatePoint pt = br.evaluate(w0);
                       LatticeField u0(q.lattice(), pt.phi.values.cast<cplx>());
                       for (int i = 0; i < u0.size(); ++i) {
                           const double x = q.lattice().site(i) / 4.0;
                           u0.values[i] += 1e-2 * std::exp(-x * x);
                       }
                       Propagator p(q);
                       EvolutionConfig cfg;
                       cfg.dt = 0.01;
                       cfg.T = 500.0 * o.time_scale;
                       cfg.cadence = 5.0 * o.time_scale;
                       cfg.store_snapshots = false;
                       auto cr = track(q, p, u0, cfg, br, w0, 0.0);
                       if (!cr.modulation.failure.empty())
                           throw NumericalFailure("contrast tracking failed: " + cr.modulation.failure);
                       double d50 = NAN, dend = cr.modulation.samples.back().infdist, best = 1e300;
                       for (const auto& s : cr.modulation.samples)
                           if (std::abs(s.t - t_transient) < best) {
                               best = std::abs(s.t - t_transient);
                               d50 = s.infdist;
                           }
                       const double ratio = dend / d50;
                       c.measured = ratio;
                       c.tolerance = 0.5;
                       c.relation = "<=";
                       c.pass = two_ok && ratio <= 0.5;
                       c.details = {{"two_eigenvalue_min_infdist", lo},
                                    {"two_eigenvalue_bound", run.zeta_bound},
                                    {"two_eigenvalue_escaped_samples", escaped},
                                    {"two_eigenvalue_ok", two_ok},
                                    {"contrast_infdist_t50", d50},
                                    {"contrast_infdist_end", dend},
                                    {"contrast_T", cfg.T},
                                    {"measured_is", "contrast infdist(T) / infdist(50)"}};
                   });
}

// ---------------------------------------------------------------- 11

CheckRecord check_normal_form(const CheckOptions& o)
{
    return guarded(11, "normal_form", "homological solves, decoupling, quadratic drift of varpi", [&](CheckRecord& c) {
        say(o, "normal form: context and first step");
        auto s = two_eigenvalue_setup(512);
        NormalFormContext ctx = make_normal_form_context(s.branch, s.omega0);
        NormalFormSystem sys = extract_system(base_system(ctx), 3, 1);
        StepResult st = normal_form_step(sys, ctx, 1);
        FieldCorrections fc = leading_field_corrections(ctx);
        const double residual = std::max({st.gen.max_residual, fc.C10.residual, fc.C01.residual,
                                          fc.Phi10.residual, fc.Phi01.residual});

        double vanish = 0.0, before = 0.0;
        for (int m = 2; m >= 0; --m) {
            const int nn = 2 - m;
            const auto& ns = st.system;
            vanish = std::max(vanish, ns.A.coeff.at({m, nn}).norm());
            before = std::max(before, sys.A.coeff.at({m, nn}).norm());
            if (m - nn != 1) {
                vanish = std::max(vanish, std::abs(ns.a.at(m, nn)));
                before = std::max(before, std::abs(sys.a.at(m, nn)));
            }
            if (m != nn) {
                vanish = std::max(vanish, std::abs(ns.b.at(m, nn)));
                before = std::max(before, std::abs(sys.b.at(m, nn)));
            }
        }
        const double imag_a = std::max(sys.max_imag_a(), st.system.max_imag_a());
        const double reality = st.gen.reality_defect;

        // Truncated-composition oracle: undoing the step recovers the original degree-2 field.
        NormalFormSystem back = extract_system(inverse_system(st.system.eval, st.gen, ctx), 3, 1);
        double roundtrip = 0.0;
        for (int m = 2; m >= 0; --m) {
            roundtrip = std::max(roundtrip, (back.A.coeff.at({m, 2 - m}) - sys.A.coeff.at({m, 2 - m})).norm());
            roundtrip = std::max(roundtrip, std::abs(back.a.at(m, 2 - m) - sys.a.at(m, 2 - m)));
            roundtrip = std::max(roundtrip, std::abs(back.b.at(m, 2 - m) - sys.b.at(m, 2 - m)));
        }
        roundtrip /= before;

        std::vector<double> tv_varpi, tv_omega;
        for (double eps : {1e-2, 5e-3}) {
            say(o, "normal form: mixed kick eps = " + format_double(eps));
            Propagator p(s.q);
            EvolutionConfig cfg;
            cfg.dt = 0.01;
            cfg.T = 200.0 * o.time_scale;
            cfg.cadence = 0.5;
            cfg.store_snapshots = false;
            TrackOptions to;
            to.falsifier = false;
            to.f_functionals = fc.functionals();
            auto run = track(s.q, p, mixed_kick(s, eps, 2), cfg, s.branch, s.omega0, 0.0, to);
            if (!run.modulation.failure.empty()) throw NumericalFailure("tracking failed: " + run.modulation.failure);
            auto ts = transform_trajectory(run.modulation, st.gen, fc);
            std::vector<double> w;
            for (const auto& x : run.modulation.samples) w.push_back(x.omega);
            tv_omega.push_back(total_variation(w));
            tv_varpi.push_back(total_variation(ts.varpi));
        }
        const double ratio = tv_varpi[0] / tv_varpi[1];
        c.measured = ratio;
        c.tolerance = 0;
        c.relation = "in [2, 8]";
        c.pass = residual <= 1e-10 && vanish <= 1e-10 && imag_a <= 1e-10 && reality <= 1e-10 && ratio >= 2.0 &&
                 ratio <= 8.0;
        c.details = {{"homological_residual_max", residual},
                     {"degree2_after_step_max", vanish},
                     {"degree2_before_step_max", before},
                     {"degree2_relative", vanish / before},
                     {"imag_a_max", imag_a},
                     {"reality_defect", reality},
                     {"inverse_roundtrip", roundtrip},
                     {"extraction_residual", st.system.extraction_residual},
                     {"tv_varpi", tv_varpi},
                     {"tv_omega", tv_omega},
                     {"tv_ratio_range", {2.0, 8.0}},
                     {"lambda", ctx.lambda()}};
    });
}

// ---------------------------------------------------------------- 12

CheckRecord check_lap_projection(const CheckOptions& o)
{
    return guarded(12, "lap_projection", "resolvent-jump projection equals the spectral complement",
                   [&](CheckRecord& c) {
                       say(o, "limiting absorption projection");
                       // The bound state decays over about 50 sites; the window keeps its
                       // truncated tail below 1e-8.
                       Potential q = make_potential("qstar", 0.3, Lattice::symmetric(1024));
                       Propagator p(q);
                       std::mt19937_64 rng(12345);
                       std::normal_distribution<double> g;
                       double worst = 0.0;
                       int nodes = 0;
                       for (int k = 0; k < 10; ++k) {
                           LatticeField u(q.lattice());
                           for (int n = -6; n <= 6; ++n) u(n) = cplx(g(rng), g(rng));
                           auto lap = limiting_absorption_projection(q, u);
                           const LatticeField ref = p.continuous_part(u);
                           worst = std::max(worst, (lap.projection.values - ref.values).norm() / u.values.norm());
                           nodes = std::max(nodes, lap.nodes);
                       }
                       c.measured = worst;
                       c.tolerance = 1e-6;
                       c.relation = "<=";
                       c.pass = worst <= 1e-6;
                       c.details = {{"inputs", 10}, {"max_quadrature_nodes", nodes}};
                   });
}

std::vector<CheckRecord> run_all_checks(const CheckOptions& o)
{
    std::vector<CheckRecord> out;
    out.push_back(check_free_kernel(o));
    out.push_back(check_dispersive_decay(o));
    out.push_back(check_zero_energy_limit(o));
    out.push_back(check_hypotheses(o));
    out.push_back(check_branch(o));
    out.push_back(check_linearization(o));
    out.push_back(check_conservation(o));
    out.push_back(check_modulation(o));
    PersistenceRun run;
    try {
        run = persistence_run(o);
    } catch (const std::exception& e) {
        run.modulation.failure = e.what();
    }
    out.push_back(check_persistence(run));
    out.push_back(check_falsifier(run, o));
    out.push_back(check_normal_form(o));
    out.push_back(check_lap_projection(o));
    return out;
}

}  // namespace dnls
