#include "dnls/evolution.hpp"

#include <algorithm>
#include <cmath>

#include "dnls/tridiagonal.hpp"

namespace dnls {

Propagator::Propagator(const Potential& q, Exec exec) : lattice_(q.lattice()), exec_(exec)
{
    auto es = eigensystem(SymTridiagonal::schrodinger(q.field));
    values_ = std::move(es.values);
    vectors_ = std::move(es.vectors);
    vectors_t_ = vectors_.transpose();
    const double lo = values_.minCoeff(), hi = values_.maxCoeff();
    center_ = 0.5 * (lo + hi);
    half_width_ = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-300;
    diag_ = (2.0 + q.field.values.array() - center_).matrix();
}

PropagatorPlan Propagator::chebyshev_plan(double t) const
{
    PropagatorPlan pl;
    pl.t = t;
    pl.chebyshev = true;
    const double x = half_width_ * t;
    auto j = bessel_j_sequence(int(std::ceil(std::abs(x))) + 60, x);
    int last = int(j.size()) - 1;
    while (last > 0 && std::abs(j[last]) < 1e-18) --last;
    const cplx ph = std::polar(1.0, -center_ * t);
    static const cplx mi[4] = {{1.0, 0.0}, {0.0, -1.0}, {-1.0, 0.0}, {0.0, 1.0}};
    for (int k = 0; k <= last; ++k) pl.coef.push_back(ph * mi[k % 4] * (k == 0 ? 1.0 : 2.0) * j[k]);
    return pl;
}

PropagatorPlan Propagator::plan(double t) const
{
    if (half_width_ * std::abs(t) <= 8.0) return chebyshev_plan(t);
    PropagatorPlan pl;
    pl.t = t;
    pl.phases = phases(t);
    return pl;
}

LatticeField Propagator::apply(const PropagatorPlan& pl, const LatticeField& u) const
{
    if (!pl.chebyshev) return apply_phases(pl.phases, u);
    require_same_lattice(lattice_, u.lattice);
    // T_0 = u, T_1 = A u, T_{k+1} = 2 A T_k - T_{k-1} with A = (H - c) / h.
    const double inv_h = 1.0 / half_width_;
    Eigen::VectorXcd prev = u.values, cur, next;
    Eigen::VectorXcd out = pl.coef[0] * prev;
    if (pl.coef.size() > 1) {
        kernels::tridiag_apply(diag_, prev, cur, exec_);
        cur *= inv_h;
        out += pl.coef[1] * cur;
    }
    for (size_t k = 2; k < pl.coef.size(); ++k) {
        kernels::tridiag_apply(diag_, cur, next, exec_);
        next = (2.0 * inv_h) * next - prev;
        out += pl.coef[k] * next;
        std::swap(prev, cur);
        std::swap(cur, next);
    }
    return LatticeField(lattice_, std::move(out));
}

Eigen::VectorXcd Propagator::phases(double t) const
{
    Eigen::VectorXcd ph(values_.size());
    for (Eigen::Index k = 0; k < values_.size(); ++k) ph[k] = std::polar(1.0, -values_[k] * t);
    return ph;
}

LatticeField Propagator::apply_phases(const Eigen::VectorXcd& ph, const LatticeField& u) const
{
    require_same_lattice(lattice_, u.lattice);
    Eigen::VectorXcd c, out;
    kernels::columns_dot(vectors_, u.values, c, exec_);  // V^T u
    c.array() *= ph.array();
    kernels::columns_dot(vectors_t_, c, out, exec_);  // V c
    return LatticeField(lattice_, std::move(out));
}

LatticeField Propagator::apply(double t, const LatticeField& u) const { return apply(plan(t), u); }

std::vector<int> Propagator::discrete_indices() const
{
    std::vector<int> idx;
    for (Eigen::Index k = 0; k < values_.size(); ++k)
        if (values_[k] < 0.0 || values_[k] > 4.0) idx.push_back(int(k));
    return idx;
}

LatticeField Propagator::continuous_part(const LatticeField& u) const
{
    require_same_lattice(lattice_, u.lattice);
    LatticeField out = u;
    for (int k : discrete_indices()) {
        Eigen::VectorXcd v = vectors_.col(k).cast<cplx>();
        out.values -= v * v.dot(u.values);
    }
    return out;
}

LatticeField linear_propagator_H(const Propagator& p, double t, const LatticeField& u) { return p.apply(t, u); }

LatticeField linear_propagator_H(const Potential& q, double t, const LatticeField& u)
{
    return Propagator(q).apply(t, u);
}

std::vector<double> bessel_j_sequence(int nmax, double x)
{
    if (nmax < 0) throw DomainError("Bessel order must be non-negative");
    std::vector<double> out(nmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    // Start well above both nmax and the turning point n = x.
    int start = int(std::max<double>(nmax, ax) + 10.0 * std::cbrt(ax) + 40.0);
    start += start % 2;
    std::vector<double> j(start + 2, 0.0);
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    for (int n = start; n >= 1; --n) {
        j[n - 1] = 2.0 * n / ax * j[n] - j[n + 1];
        if (std::abs(j[n - 1]) > 1e250) {
            for (int k = n - 1; k <= start + 1; ++k) j[k] *= 1e-250;
        }
    }
    // J_0 + 2 sum J_{2k} = 1
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
    for (int n = 0; n <= nmax; ++n) {
        double v = j[n] / norm;
        out[n] = (x < 0.0 && n % 2 == 1) ? -v : v;
    }
    return out;
}

static cplx i_power(int n)
{
    switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

cplx free_propagator_kernel(double t, int n)
{
    // J_{-n} = (-1)^n J_n, so the kernel is even in n.
    const int a = std::abs(n);
    const double j = bessel_j_sequence(a, 2.0 * t)[a];
    return std::polar(1.0, -2.0 * t) * i_power(a) * j;
}

LatticeField free_propagator_kernel(double t, const Lattice& lat)
{
    const int m = std::max(std::abs(lat.n_min), std::abs(lat.n_max));
    auto j = bessel_j_sequence(m, 2.0 * t);
    const cplx ph = std::polar(1.0, -2.0 * t);
    LatticeField k(lat);
    for (int i = 0; i < lat.size(); ++i) {
        int a = std::abs(lat.site(i));
        k.values[i] = ph * i_power(a) * j[a];
    }
    return k;
}

LatticeField free_convolution(double t, const LatticeField& u)
{
    const Lattice& lat = u.lattice;
    const int span = lat.size() - 1;
    auto j = bessel_j_sequence(span, 2.0 * t);
    const cplx ph = std::polar(1.0, -2.0 * t);
    std::vector<cplx> k(span + 1);
    for (int d = 0; d <= span; ++d) k[d] = ph * i_power(d) * j[d];
    LatticeField out(lat);
    const int n = lat.size();
    for (int a = 0; a < n; ++a) {
        cplx s = 0.0;
        for (int b = 0; b < n; ++b)
            if (u.values[b] != 0.0) s += k[std::abs(a - b)] * u.values[b];
        out.values[a] = s;
    }
    return out;
}

LatticeField nonlinear_substep(const LatticeField& u, double tau)
{
    LatticeField out = u;
    for (Eigen::Index i = 0; i < out.values.size(); ++i) {
        double m = std::norm(u.values[i]);
        out.values[i] *= std::polar(1.0, m * m * m * tau);
    }
    return out;
}

static void check_dt(double dt)
{
    if (!(std::abs(dt) <= 0.05) || dt == 0.0) throw DomainError("time step must satisfy 0 < |dt| <= 0.05");
}

LatticeField step(const Propagator& p, const LatticeField& u, double dt)
{
    check_dt(dt);
    return nonlinear_substep(p.apply(dt, nonlinear_substep(u, 0.5 * dt)), 0.5 * dt);
}

LatticeField step(const Potential& q, const LatticeField& u, double dt) { return step(Propagator(q), u, dt); }

ConservedQuantities conserved_quantities(const Potential& q, const LatticeField& u)
{
    ConservedQuantities c;
    c.mass = u.values.squaredNorm();
    double quartic = 0.0;
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
        double m = std::norm(u.values[i]);
        quartic += m * m * m * m;
    }
    c.energy = inner(apply_H(q, u), u).real() - 0.25 * quartic;
    return c;
}

static double max_relative_drift(const std::vector<double>& s)
{
    if (s.empty()) return 0.0;
    double d = 0.0, ref = std::abs(s.front());
    for (double v : s) d = std::max(d, std::abs(v - s.front()));
    return ref > 0.0 ? d / ref : d;
}

double Trajectory::max_relative_mass_drift() const { return max_relative_drift(mass); }
double Trajectory::max_relative_energy_drift() const { return max_relative_drift(energy); }

Trajectory evolve(const Potential& q, const Propagator& p, const LatticeField& u0, const EvolutionConfig& cfg,
                  const Observer& observer)
{
    check_dt(cfg.dt);
    if (!(cfg.dt > 0.0) || !(cfg.T >= cfg.dt)) throw DomainError("evolution needs dt > 0 and T >= dt");
    require_same_lattice(p.lattice(), u0.lattice);
    const long steps = std::lround(cfg.T / cfg.dt);
    const double dt = cfg.T / double(steps);
    const long every = std::max(1L, std::lround(cfg.cadence / dt));
    const PropagatorPlan plan = p.plan(dt);

    Trajectory tr;
    auto record = [&](double t, const LatticeField& u) {
        auto c = conserved_quantities(q, u);
        tr.times.push_back(t);
        tr.mass.push_back(c.mass);
        tr.energy.push_back(c.energy);
        if (cfg.store_snapshots) tr.snapshots.push_back(u);
        if (observer) observer(t, u);
    };
    LatticeField u = u0;
    record(0.0, u);
    for (long s = 1; s <= steps; ++s) {
        u = nonlinear_substep(p.apply(plan, nonlinear_substep(u, 0.5 * dt)), 0.5 * dt);
        if (s % every == 0 || s == steps) record(double(s) * dt, u);
    }
    return tr;
}

double boundary_mass(const LatticeField& u)
{
    const int n = u.lattice.size();
    const int edge = std::max(1, n / 16);
    return u.values.head(edge).squaredNorm() + u.values.tail(edge).squaredNorm();
}

DecayFitResult decay_exponent(const Propagator& p, const LatticeField& u0, const std::vector<double>& t_grid)
{
    if (t_grid.size() < 2) throw DomainError("decay fit needs at least two times");
    DecayFitResult r;
    const double m0 = u0.values.squaredNorm();
    for (double t : t_grid) {
        LatticeField u = p.apply(t, u0);
        double b = boundary_mass(u) / m0;
        r.max_boundary_mass = std::max(r.max_boundary_mass, b);
        if (b > 1e-6)
            throw NumericalFailure("reflection contamination: boundary mass " + std::to_string(b) + " at t = " +
                                   std::to_string(t));
        r.times.push_back(t);
        r.sup_norms.push_back(u.values.cwiseAbs().maxCoeff());
    }
    const int m = int(r.times.size());
    Eigen::MatrixXd a(m, 2);
    Eigen::VectorXd y(m);
    for (int i = 0; i < m; ++i) {
        a(i, 0) = 1.0;
        a(i, 1) = std::log(r.times[i]);
        y[i] = std::log(r.sup_norms[i]);
    }
    Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
    r.prefactor = std::exp(c[0]);
    r.exponent = c[1];
    r.rms_residual = std::sqrt((a * c - y).squaredNorm() / m);
    return r;
}

std::vector<double> log_spaced(double a, double b, int count)
{
    if (count < 2 || !(a > 0.0) || !(b > a)) throw DomainError("log_spaced needs 0 < a < b and count >= 2");
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) out[i] = a * std::pow(b / a, double(i) / (count - 1));
    return out;
}

}  // namespace dnls
