#include "dnls/modulation.hpp"

#include <algorithm>
#include <cmath>

namespace dnls {

namespace {

constexpr double kBinom4[5] = {1, 4, 6, 4, 1};
constexpr double kBinom3[4] = {1, 3, 3, 1};

struct Projections {
    double g1, g2;
    double orth;
};

Projections orthogonality_of(const LatticeField& r, const GroundStatePoint& p)
{
    Projections pr;
    pr.g1 = r.values.real().dot(p.phi.values);
    pr.g2 = r.values.imag().dot(p.dphi.values);
    pr.orth = std::max(std::abs(pr.g1) / p.phi.values.norm(), std::abs(pr.g2) / p.dphi.values.norm());
    return pr;
}

}  // namespace

double orthogonality_relative(const ModulationState& s)
{
    const double unorm = (s.point.phi.values.cast<cplx>() + s.r.values).norm();
    return s.orthogonality / std::max(s.r.values.norm(), 1e-4 * unorm);
}

GroundStatePoint LocalBranch::operator()(double omega)
{
    if (!branch_.contains(omega)) throw DomainError("omega " + std::to_string(omega) + " is outside the branch interval");
    if (!ref_ || std::abs(omega - ref_->omega) > radius_ * (ref_->omega - branch_.E0)) {
        ref_ = branch_.evaluate(omega);
        return *ref_;
    }
    const double d = omega - ref_->omega;
    GroundStatePoint p = *ref_;
    p.omega = omega;
    p.phi.values += d * ref_->dphi.values + 0.5 * d * d * ref_->d2phi.values;
    p.dphi.values += d * ref_->d2phi.values;
    p.mass = p.phi.values.squaredNorm();
    p.mass_prime = 2.0 * p.phi.values.dot(p.dphi.values);
    return p;
}

ModulationState decompose(const LatticeField& u, const GroundStateBranch& branch, double omega_guess,
                          double theta_guess, int max_iterations)
{
    LocalBranch local(branch, 0.0);
    return decompose(u, local, omega_guess, theta_guess, max_iterations);
}

ModulationState decompose(const LatticeField& u, LocalBranch& local, double omega_guess, double theta_guess,
                          int max_iterations)
{
    const GroundStateBranch& branch = local.branch();
    require_same_lattice(u.lattice, branch.q.lattice());
    double omega = omega_guess, theta = theta_guess;
    const double scale = branch.eta;
    ModulationState s;
    // The last step is always applied and followed by one more evaluation,
    // so the returned residual is quadratically below the stopping step.
    bool small = false;
    for (int it = 0; it <= max_iterations; ++it) {
        GroundStatePoint p = local(omega);
        LatticeField v(u.lattice, u.values * std::polar(1.0, -theta));
        if (small || it == max_iterations) {
            s.omega = omega;
            s.theta = theta;
            s.r = LatticeField(u.lattice, v.values - p.phi.values.cast<cplx>());
            s.orthogonality = orthogonality_of(s.r, p).orth;
            s.point = std::move(p);
            s.iterations = it;
            if (!small) throw NumericalFailure("decomposition Newton did not converge: outside the orbital tube");
            return s;
        }
        const Eigen::VectorXd re = v.values.real(), im = v.values.imag();
        const double g1 = (re - p.phi.values).dot(p.phi.values);
        const double g2 = im.dot(p.dphi.values);
        Eigen::Matrix2d j;
        j(0, 0) = re.dot(p.dphi.values) - 2.0 * p.phi.values.dot(p.dphi.values);
        j(0, 1) = im.dot(p.phi.values);
        j(1, 0) = im.dot(p.d2phi.values);
        j(1, 1) = -re.dot(p.dphi.values);
        Eigen::Vector2d step = j.fullPivLu().solve(Eigen::Vector2d(-g1, -g2));
        if (!step.allFinite()) throw NumericalFailure("decomposition Newton matrix is singular");
        small = std::abs(step[0]) <= 1e-10 * scale && std::abs(step[1]) <= 1e-10;
        // Damp steps that would leave the branch interval.
        double w = omega + step[0];
        double damp = 1.0;
        while (!branch.contains(w) && damp > 1e-3) {
            damp *= 0.5;
            w = omega + damp * step[0];
        }
        if (!branch.contains(w)) throw DomainError("decomposition left the branch interval");
        omega = w;
        theta += damp * step[1];
    }
    throw NumericalFailure("decomposition Newton did not converge");
}

double decompose_multistart_spread(const LatticeField& u, const GroundStateBranch& branch, double omega_guess,
                                   double theta_guess)
{
    ModulationState ref = decompose(u, branch, omega_guess, theta_guess);
    double spread = 0.0;
    const double dw = 0.05 * (omega_guess - branch.E0);
    for (double a : {-1.0, 1.0})
        for (double b : {-1.0, 1.0}) {
            ModulationState s = decompose(u, branch, omega_guess + a * dw, theta_guess + 0.05 * b);
            spread = std::max({spread, std::abs(s.omega - ref.omega) / branch.eta,
                               std::abs(std::remainder(s.theta - ref.theta, 2.0 * M_PI))});
        }
    return spread;
}

DiscreteContinuousSplit split_discrete_continuous(const SpinorField& R, const LinearizationData& lin)
{
    require_same_lattice(R.lattice, lin.lattice());
    const Eigen::VectorXcd r = R.stacked();
    DiscreteContinuousSplit out;
    const double pairing = lin.xi.dot(sigma3(lin.xi)).real();
    if (!(std::abs(pairing - 1.0) < 1e-6)) throw NumericalFailure("internal mode is not sigma3-normalized");
    out.z = sigma3(lin.xi).dot(r);
    Eigen::VectorXcd f = r - out.z * lin.xi - std::conj(out.z) * sigma1(lin.xi);
    const double nf = f.norm();
    out.pc_defect = (lin.project_c(f) - f).norm() / std::max(r.norm(), 1e-300);
    out.f = SpinorField::from_stacked(R.lattice, f);
    out.reality_defect = nf > 0.0 ? (sigma1(f) - f.conjugate()).norm() / nf : 0.0;
    return out;
}

DiscreteContinuousSplit split_discrete_continuous(const LatticeField& r, const LinearizationData& lin)
{
    return split_discrete_continuous(SpinorField::from_scalar(r), lin);
}

LatticeField nonlinear_remainder(const RealField& phi, const LatticeField& r)
{
    require_same_lattice(phi.lattice, r.lattice);
    LatticeField out(r.lattice);
    for (Eigen::Index k = 0; k < r.values.size(); ++k) {
        const cplx a = r.values[k], b = std::conj(a);
        const double f = phi.values[k];
        cplx s = 0.0;
        cplx ai = 1.0;
        for (int i = 0; i <= 4; ++i) {
            cplx bj = 1.0;
            for (int j = 0; j <= 3; ++j) {
                if (i + j >= 2) s += kBinom4[i] * kBinom3[j] * std::pow(f, 7 - i - j) * ai * bj;
                bj *= b;
            }
            ai *= a;
        }
        out.values[k] = -s;
    }
    return out;
}

ModulationRates modulation_rhs(const LatticeField& r, const GroundStatePoint& p)
{
    require_same_lattice(r.lattice, p.phi.lattice);
    const Eigen::VectorXcd rp = r.values + r.values.conjugate();
    const Eigen::VectorXcd rm = r.values - r.values.conjugate();
    const Eigen::VectorXcd& phi = p.phi.values.cast<cplx>();
    const Eigen::VectorXcd& dphi = p.dphi.values.cast<cplx>();
    const Eigen::VectorXcd& d2phi = p.d2phi.values.cast<cplx>();
    auto pr = [](const Eigen::VectorXcd& a, const Eigen::VectorXcd& realb) { return realb.dot(a); };
    const double qp = p.mass_prime;
    Eigen::Matrix2cd m;
    m(0, 0) = qp - pr(rp, dphi);
    m(0, 1) = pr(rm, phi);
    m(1, 0) = -pr(rm, d2phi);
    m(1, 1) = qp + pr(rp, dphi);
    LatticeField n = nonlinear_remainder(p.phi, r);
    Eigen::Vector2cd rhs(pr(n.values - n.values.conjugate(), phi), pr(n.values + n.values.conjugate(), dphi));
    Eigen::Vector2cd x = m.fullPivLu().solve(rhs);
    ModulationRates out;
    out.condition = std::abs(m.determinant()) / (qp * qp);
    if (!(out.condition > 1e-8) || !x.allFinite())
        throw NumericalFailure("modulation matrix is singular: r is too large for the tube");
    out.omega_dot = x[0].imag();
    out.gamma_dot = -x[1].real();
    out.reality_defect = std::abs(x[0].real()) + std::abs(x[1].imag());
    return out;
}

FalsifierPoint stability_falsifier(const LatticeField& u, const GroundStateBranch& branch, double sigma,
                                   double mu_guess)
{
    require_same_lattice(u.lattice, branch.q.lattice());
    Eigen::VectorXd w = weight_vector(u.lattice, -sigma);
    const Eigen::VectorXd W = w.array().square();
    const double lo = branch.E0 + 1e-3 * branch.eta, hi = branch.E0 + branch.eta;
    double mu = std::clamp(mu_guess, lo, hi);
    FalsifierPoint out;
    int pinned = 0;
    GroundStatePoint p;
    for (int it = 0; it < 40; ++it) {
        p = branch.evaluate(mu);
        const Eigen::VectorXd& f = p.phi.values;
        const Eigen::VectorXd& df = p.dphi.values;
        const Eigen::VectorXd& d2f = p.d2phi.values;
        const cplx A = (W.array() * f.array()).matrix().cast<cplx>().dot(u.values);
        const cplx A1 = (W.array() * df.array()).matrix().cast<cplx>().dot(u.values);
        const cplx A2 = (W.array() * d2f.array()).matrix().cast<cplx>().dot(u.values);
        const double a = std::abs(A);
        if (a == 0.0) break;
        const double ra = (std::conj(A) * A1).real();
        const double S1 = 2.0 * (W.array() * f.array() * df.array()).sum();
        const double S2 = 2.0 * (W.array() * (df.array().square() + f.array() * d2f.array())).sum();
        const double a1 = ra / a;
        const double a2 = (std::norm(A1) + (std::conj(A) * A2).real()) / a - ra * ra / (a * a * a);
        const double d1 = S1 - 2.0 * a1, d2 = S2 - 2.0 * a2;
        double step = d2 > 0.0 ? -d1 / d2 : (d1 > 0.0 ? -0.1 : 0.1) * branch.eta;
        step = std::clamp(step, -0.25 * branch.eta, 0.25 * branch.eta);
        double next = std::clamp(mu + step, lo, hi);
        if (next == mu && (next == lo || next == hi)) {
            if (++pinned >= 2) {
                out.escaped = true;
                break;
            }
        }
        const bool done = std::abs(next - mu) <= 1e-12 * branch.eta;
        mu = next;
        if (done) break;
    }
    p = branch.evaluate(mu);
    const cplx A = (W.array() * p.phi.values.array()).matrix().cast<cplx>().dot(u.values);
    out.kappa = std::arg(A);
    out.mu = mu;
    Eigen::VectorXcd d = u.values - std::polar(1.0, out.kappa) * p.phi.values.cast<cplx>();
    out.distance = (w.cast<cplx>().array() * d.array()).matrix().norm();
    return out;
}

// ---------------------------------------------------------------- tracking

Tracker::Tracker(const GroundStateBranch& branch, const Propagator& p, double dt, double omega_guess,
                 double theta_guess, TrackOptions opts)
    : branch_(branch), local_(branch), prop_(p), dt_(dt), opts_(std::move(opts)), omega_prev_(omega_guess), theta_prev_(theta_guess),
      has_mode_(std::isfinite(branch.E1))
{
}

ModulationState Tracker::decompose_with_refinement(double t, const LatticeField& u, int depth)
{
    std::string why;
    try {
        ModulationState s = decompose(u, local_, omega_prev_, theta_prev_);
        if (s.iterations <= opts_.newton_budget || !t_prev_) return s;
        why = "iteration budget";
    } catch (const Error& e) {
        if (!t_prev_) throw;
        why = e.what();
    }
    const long n = std::lround((t - *t_prev_) / dt_);
    if (depth >= opts_.max_bisection_depth || n < 2)
        throw NumericalFailure("tracking failed at t = " + std::to_string(t) + ": " + why);
    LatticeField mid = u_prev_;
    for (long k = 0; k < n / 2; ++k) mid = step(prop_, mid, dt_);
    const double tm = *t_prev_ + double(n / 2) * dt_;
    ModulationState sm = decompose_with_refinement(tm, mid, depth + 1);
    ++mt_.bisections;
    t_prev_ = tm;
    u_prev_ = mid;
    omega_prev_ = sm.omega;
    theta_prev_ = sm.theta;
    return decompose_with_refinement(t, u, depth + 1);
}

void Tracker::observe(double t, const LatticeField& u)
{
    if (mt_.tube_exit) return;
    try {
        ModulationState s = decompose_with_refinement(t, u, 0);
        record(t, u, s);
        t_prev_ = t;
        u_prev_ = u;
        omega_prev_ = s.omega;
        theta_prev_ = s.theta;
    } catch (const Error& e) {
        mt_.tube_exit = true;
        mt_.failure = e.what();
    }
}

void Tracker::record(double t, const LatticeField& u, const ModulationState& s)
{
    ModulationSample smp;
    smp.t = t;
    smp.omega = s.omega;
    smp.theta = s.theta;
    smp.iterations = s.iterations;
    smp.orthogonality = orthogonality_relative(s);
    smp.r_norm = s.r.values.norm();

    if (!mt_.samples.empty()) {
        const auto& prev = mt_.samples.back();
        const double int_omega_prev = prev.theta - prev.gamma;
        smp.gamma = s.theta - (int_omega_prev + 0.5 * (prev.omega + s.omega) * (t - prev.t));
    } else {
        smp.gamma = s.theta;
    }

    SpinorField R = SpinorField::from_scalar(s.r);
    if (has_mode_) {
        if (!lin_) {
            lin_ = build_linearization(branch_, s.point);
            internal_mode_iterative(*lin_, branch_.phi1);
        } else {
            LinearizationData next = build_linearization(branch_, s.point);
            refine_internal_mode(next, lin_->lambda, lin_->xi, branch_.phi1);
            lin_ = std::move(next);
        }
        auto split = split_discrete_continuous(R, *lin_);
        smp.z = split.z;
        smp.lambda = lin_->lambda;
        smp.pc_defect = split.pc_defect;
        smp.f_wnorm = weighted_norm(split.f, -2.0);
        for (const auto& b : opts_.f_functionals) smp.f_pairings.push_back(b.dot(split.f.stacked()));
    } else {
        smp.lambda = std::numeric_limits<double>::quiet_NaN();
        smp.f_wnorm = weighted_norm(R, -2.0);
        for (const auto& b : opts_.f_functionals) smp.f_pairings.push_back(b.dot(R.stacked()));
    }

    auto rates = modulation_rhs(s.r, s.point);
    smp.omega_dot = rates.omega_dot;
    smp.gamma_dot = rates.gamma_dot;

    if (opts_.falsifier) {
        try {
            auto fp = stability_falsifier(u, branch_, opts_.sigma, s.omega);
            smp.infdist = fp.distance;
            smp.infdist_escaped = fp.escaped;
        } catch (const Error&) {
            smp.infdist_escaped = true;
        }
    }

    Eigen::VectorXcd rec = std::polar(1.0, s.theta) * (s.point.phi.values.cast<cplx>() + s.r.values);
    mt_.max_reconstruction = std::max(mt_.max_reconstruction, (rec - u.values).norm() / u.values.norm());
    mt_.max_orthogonality = std::max(mt_.max_orthogonality, smp.orthogonality);
    if (!mt_.samples.empty()) {
        const auto& prev = mt_.samples.back();
        mt_.f_l2_integral += 0.5 * (prev.f_wnorm * prev.f_wnorm + smp.f_wnorm * smp.f_wnorm) * (t - prev.t);
    }
    mt_.samples.push_back(std::move(smp));
}

TrackedRun track(const Potential& q, const Propagator& p, const LatticeField& u0, const EvolutionConfig& cfg,
                 const GroundStateBranch& branch, double omega_guess, double theta_guess, TrackOptions opts)
{
    Tracker tracker(branch, p, cfg.T / double(std::lround(cfg.T / cfg.dt)), omega_guess, theta_guess,
                    std::move(opts));
    TrackedRun run;
    run.trajectory = evolve(q, p, u0, cfg, [&](double t, const LatticeField& u) { tracker.observe(t, u); });
    run.modulation = tracker.take();
    return run;
}

PersistenceMetric persistence_metric(const ModulationTrajectory& mt)
{
    if (mt.samples.empty()) throw DomainError("empty modulation trajectory");
    const double z0 = std::abs(mt.samples.front().z);
    if (z0 == 0.0) throw DomainError("persistence metric needs |z(0)| > 0");
    PersistenceMetric m;
    m.min_ratio = std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : mt.samples) {
        const double a = std::abs(s.z);
        m.min_ratio = std::min(m.min_ratio, a / z0);
        m.drift = std::max(m.drift, std::abs(a * a - z0 * z0));
        lo = std::min(lo, a * a);
        hi = std::max(hi, a * a);
    }
    m.oscillation = hi - lo;
    return m;
}

std::vector<double> centered_derivative(const std::vector<double>& t, const std::vector<double>& y)
{
    const size_t n = t.size();
    if (n < 3 || y.size() != n) throw DomainError("centered derivative needs at least three samples");
    std::vector<double> d(n);
    for (size_t i = 0; i < n; ++i) {
        if (i >= 2 && i + 2 < n) {
            const double h = (t[i + 2] - t[i - 2]) / 4.0;
            d[i] = (-y[i + 2] + 8.0 * y[i + 1] - 8.0 * y[i - 1] + y[i - 2]) / (12.0 * h);
        } else if (i >= 1 && i + 1 < n) {
            d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
        } else if (i == 0) {
            d[i] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (t[2] - t[0]);
        } else {
            d[i] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (t[n - 1] - t[n - 3]);
        }
    }
    return d;
}

}  // namespace dnls
