#include "dnls/ground_state.hpp"

#include <algorithm>
#include <cmath>

#include "dnls/io.hpp"
#include "dnls/tridiagonal.hpp"

namespace dnls {

namespace {

// L_+ = H + omega - 7 phi^6 as a symmetric tridiagonal matrix.
SymTridiagonal linearized_plus(const Potential& q, double omega, const RealField& phi)
{
    SymTridiagonal t = SymTridiagonal::schrodinger(q.field, omega);
    t.diag.array() -= 7.0 * phi.values.array().pow(6);
    return t;
}

RealField solve_plus(const Potential& q, double omega, const RealField& phi, const Eigen::VectorXd& rhs)
{
    try {
        return RealField(q.lattice(), solve(linearized_plus(q, omega, phi), rhs));
    } catch (const NumericalFailure&) {
        throw NumericalFailure("L_+ is singular (fold point) at omega = " + format_double(omega));
    }
}

}  // namespace

RealField ground_state_residual(const Potential& q, double omega, const RealField& phi)
{
    RealField f = apply_H(q, phi);
    f.values += omega * phi.values - phi.values.array().pow(7).matrix();
    return f;
}

RealField bifurcation_seed(const RealField& phi0, double E0, double omega)
{
    if (omega < E0) throw DomainError("bifurcation seed needs omega >= E0");
    double l8 = std::pow(phi0.values.array().abs().pow(8).sum(), 1.0 / 8.0);
    double c = std::pow(omega - E0, 1.0 / 6.0) * std::pow(l8, -4.0 / 3.0);
    return RealField(phi0.lattice, c * phi0.values);
}

RealField solve_ground_state(const Potential& q, double omega, const RealField& seed, NewtonReport* report, double tol)
{
    require_same_lattice(q.lattice(), seed.lattice);
    RealField phi = seed;
    RealField f = ground_state_residual(q, omega, phi);
    double res = f.values.norm();
    NewtonReport rep;
    rep.history.push_back(res);
    int it = 0;
    while (res > tol) {
        if (++it > 50) throw NumericalFailure("ground-state Newton did not converge in 50 iterations");
        RealField step = solve_plus(q, omega, phi, -f.values);
        double t = 1.0;
        RealField trial = phi;
        double trial_res = 0.0;
        for (int halvings = 0;; ++halvings) {
            trial.values = phi.values + t * step.values;
            trial_res = ground_state_residual(q, omega, trial).values.norm();
            if (trial_res < res || halvings >= 30) break;
            t *= 0.5;
        }
        if (!std::isfinite(trial_res)) throw NumericalFailure("ground-state Newton diverged");
        if (trial_res >= res && res > 100.0 * tol) throw NumericalFailure("ground-state Newton stalled");
        if (trial_res >= res) break;  // at the rounding floor
        phi = trial;
        f = ground_state_residual(q, omega, phi);
        res = f.values.norm();
        rep.history.push_back(res);
    }
    // One polishing step: L_+ is nearly singular close to E0, so a residual
    // at tol can still hide a solution error of tol / (omega - E0).
    if (res > 0.0) {
        RealField step = solve_plus(q, omega, phi, -f.values);
        RealField trial(phi.lattice, phi.values + step.values);
        double trial_res = ground_state_residual(q, omega, trial).values.norm();
        if (trial_res <= 4.0 * res) {
            phi = trial;
            res = trial_res;
            rep.history.push_back(res);
        }
    }
    rep.iterations = it;
    rep.residual = res;
    if (report) *report = rep;

    const Lattice& lat = phi.lattice;
    const int half = lat.n_max / 2;
    for (int n = -half; n <= half; ++n)
        if (!(phi.at(n) > 0.0))
            throw NumericalFailure("Newton converged to a solution that changes sign or is negative: not a ground state");
    return phi;
}

RealField omega_derivative(const Potential& q, double omega, const RealField& phi)
{
    return solve_plus(q, omega, phi, -phi.values);
}

RealField omega_second_derivative(const Potential& q, double omega, const RealField& phi, const RealField& dphi)
{
    Eigen::VectorXd rhs = -2.0 * dphi.values.array() + 42.0 * phi.values.array().pow(5) * dphi.values.array().square();
    return solve_plus(q, omega, phi, rhs);
}

double default_eta(double E0, double E1)
{
    double scale = std::isfinite(E1) ? std::min(E0, E1 - 4.0) : E0;
    return std::min(0.1, 0.25 * scale);
}

GroundStatePoint GroundStateBranch::at_grid(size_t k) const
{
    GroundStatePoint p;
    p.omega = omegas.at(k);
    p.phi = phi[k];
    p.dphi = dphi[k];
    p.d2phi = omega_second_derivative(q, p.omega, p.phi, p.dphi);
    p.mass = mass[k];
    p.mass_prime = mass_prime[k];
    return p;
}

GroundStatePoint GroundStateBranch::evaluate(double omega) const
{
    if (!contains(omega)) throw DomainError("omega " + format_double(omega) + " is outside the branch interval");
    if (omegas.empty()) throw DomainError("empty branch");
    for (size_t k = 0; k < omegas.size(); ++k)
        if (omegas[k] == omega) return at_grid(k);

    RealField seed(q.lattice());
    auto hi = std::upper_bound(omegas.begin(), omegas.end(), omega);
    if (hi == omegas.begin()) {
        seed.values = phi[0].values + (omega - omegas[0]) * dphi[0].values;
    } else if (hi == omegas.end()) {
        size_t k = omegas.size() - 1;
        seed.values = phi[k].values + (omega - omegas[k]) * dphi[k].values;
    } else {
        size_t k1 = size_t(hi - omegas.begin()), k0 = k1 - 1;
        double h = omegas[k1] - omegas[k0];
        double s = (omega - omegas[k0]) / h;
        double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        seed.values = h00 * phi[k0].values + h10 * h * dphi[k0].values + h01 * phi[k1].values +
                      h11 * h * dphi[k1].values;
    }
    GroundStatePoint p;
    p.omega = omega;
    p.phi = solve_ground_state(q, omega, seed);
    p.dphi = omega_derivative(q, omega, p.phi);
    p.d2phi = omega_second_derivative(q, omega, p.phi, p.dphi);
    p.mass = p.phi.values.squaredNorm();
    p.mass_prime = 2.0 * p.phi.values.dot(p.dphi.values);
    return p;
}

GroundStateBranch continue_branch(const Potential& q, const BranchConfig& cfg)
{
    GroundStateBranch b;
    b.q = q;
    b.q_hash = hash_field(q.field);
    auto low = lowest_eigenpair(q);
    if (!(low.value < 0.0)) throw DomainError("H has no eigenvalue below 0: no ground-state branch");
    b.E0 = -low.value;
    b.phi0 = low.vector;
    auto high = highest_eigenpair(q);
    if (high.value > 4.0) {
        b.E1 = high.value;
        b.phi1 = high.vector;
    } else {
        b.E1 = std::numeric_limits<double>::quiet_NaN();
    }
    b.eta = cfg.eta.value_or(default_eta(b.E0, b.E1));

    if (!cfg.omegas.empty()) {
        b.omegas = cfg.omegas;
    } else {
        for (int k = 1; k <= cfg.count; ++k) b.omegas.push_back(b.E0 + b.eta * k / (cfg.count + 1));
    }
    if (!std::is_sorted(b.omegas.begin(), b.omegas.end()))
        throw DomainError("branch grid must be increasing");
    for (double w : b.omegas)
        if (!(w > b.E0 && w < b.E0 + b.eta * (1 + 1e-12)))
            throw DomainError("branch grid point " + format_double(w) + " lies outside (E0, E0 + eta)");

    for (size_t k = 0; k < b.omegas.size(); ++k) {
        const double w = b.omegas[k];
        RealField seed = k == 0 ? bifurcation_seed(b.phi0, b.E0, w)
                                : RealField(q.lattice(), b.phi[k - 1].values + (w - b.omegas[k - 1]) * b.dphi[k - 1].values);
        NewtonReport rep;
        RealField p = solve_ground_state(q, w, seed, &rep);
        RealField dp = omega_derivative(q, w, p);

        RealField lp = apply_H(q, dp);
        lp.values += w * dp.values - 7.0 * (p.values.array().pow(6) * dp.values.array()).matrix() + p.values;

        const double h = 2e-4 * (w - b.E0);
        RealField pp = solve_ground_state(q, w + h, RealField(q.lattice(), p.values + h * dp.values));
        RealField pm = solve_ground_state(q, w - h, RealField(q.lattice(), p.values - h * dp.values));

        b.phi.push_back(p);
        b.dphi.push_back(dp);
        b.mass.push_back(p.values.squaredNorm());
        b.mass_prime.push_back(2.0 * p.values.dot(dp.values));
        b.mass_prime_fd.push_back((pp.values.squaredNorm() - pm.values.squaredNorm()) / (2.0 * h));
        b.residual.push_back(rep.residual);
        b.implicit_residual.push_back(lp.values.norm());
        b.newton_iterations.push_back(rep.iterations);
    }
    return b;
}

void save_branch(const GroundStateBranch& b, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    nlohmann::json m;
    m["q_hash"] = b.q_hash;
    m["profile"] = b.q.profile;
    m["eps"] = b.q.eps;
    m["E0"] = b.E0;
    m["E1"] = std::isfinite(b.E1) ? nlohmann::json(b.E1) : nlohmann::json(nullptr);
    m["eta"] = b.eta;
    m["omegas"] = b.omegas;
    m["mass"] = b.mass;
    m["mass_prime"] = b.mass_prime;
    m["mass_prime_fd"] = b.mass_prime_fd;
    m["residual"] = b.residual;
    m["implicit_residual"] = b.implicit_residual;
    m["newton_iterations"] = b.newton_iterations;
    write_field(dir / "potential.txt", b.q.field, {{"kind", "potential"}});
    write_field(dir / "phi0.txt", b.phi0, {{"kind", "phi0"}});
    if (std::isfinite(b.E1)) write_field(dir / "phi1.txt", b.phi1, {{"kind", "phi1"}});
    nlohmann::json files = nlohmann::json::array();
    for (size_t k = 0; k < b.omegas.size(); ++k) {
        std::string pf = "phi_" + std::to_string(k) + ".txt";
        std::string df = "dphi_" + std::to_string(k) + ".txt";
        write_field(dir / pf, b.phi[k], {{"kind", "phi"}, {"omega", b.omegas[k]}});
        write_field(dir / df, b.dphi[k], {{"kind", "dphi"}, {"omega", b.omegas[k]}});
        files.push_back({{"phi", pf}, {"dphi", df}});
    }
    m["files"] = files;
    write_json(dir / "branch.json", m);
}

GroundStateBranch load_branch(const std::filesystem::path& dir)
{
    nlohmann::json m = read_json(dir / "branch.json");
    GroundStateBranch b;
    b.q.field = read_real_field(dir / "potential.txt");
    b.q.profile = m.at("profile").get<std::string>();
    b.q.eps = m.at("eps").get<double>();
    b.q_hash = m.at("q_hash").get<std::string>();
    if (hash_field(b.q.field) != b.q_hash) throw Error("branch potential does not match its recorded hash");
    b.E0 = m.at("E0").get<double>();
    b.E1 = m.at("E1").is_null() ? std::numeric_limits<double>::quiet_NaN() : m.at("E1").get<double>();
    b.eta = m.at("eta").get<double>();
    b.phi0 = read_real_field(dir / "phi0.txt");
    if (std::isfinite(b.E1)) b.phi1 = read_real_field(dir / "phi1.txt");
    b.omegas = m.at("omegas").get<std::vector<double>>();
    b.mass = m.at("mass").get<std::vector<double>>();
    b.mass_prime = m.at("mass_prime").get<std::vector<double>>();
    b.mass_prime_fd = m.at("mass_prime_fd").get<std::vector<double>>();
    b.residual = m.at("residual").get<std::vector<double>>();
    b.implicit_residual = m.at("implicit_residual").get<std::vector<double>>();
    b.newton_iterations = m.at("newton_iterations").get<std::vector<int>>();
    for (const auto& f : m.at("files")) {
        b.phi.push_back(read_real_field(dir / f.at("phi").get<std::string>()));
        b.dphi.push_back(read_real_field(dir / f.at("dphi").get<std::string>()));
    }
    return b;
}

}  // namespace dnls
