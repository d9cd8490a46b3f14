#include "dnls/scattering.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dnls {

namespace {

constexpr cplx I{0.0, 1.0};

Lattice extended(const Lattice& lat) { return Lattice(lat.n_min - 1, lat.n_max + 1); }

// [f, g](nu) = f(nu+1) g(nu) - f(nu) g(nu+1), evaluated at the window center.
cplx bracket(const LatticeField& f, const LatticeField& g, int nu)
{
    return f.at(nu + 1) * g.at(nu) - f.at(nu) * g.at(nu + 1);
}

LatticeField conj_field(const LatticeField& f) { return LatticeField(f.lattice, f.values.conjugate()); }

}  // namespace

cplx theta_from_spectral(cplx z, std::optional<Side> side)
{
    const bool on_band = z.imag() == 0.0 && z.real() >= 0.0 && z.real() <= 4.0;
    if (on_band) {
        if (!side) throw DomainError("spectral parameter on [0,4] needs a boundary side");
        double t0 = std::acos(std::clamp(1.0 - 0.5 * z.real(), -1.0, 1.0));
        return *side == Side::Plus ? cplx(-t0, 0.0) : cplx(t0, 0.0);
    }
    cplx th = std::acos(1.0 - 0.5 * z);
    if (th.imag() > 0.0) th = -th;
    return th;
}

JostData jost(const Potential& q, cplx theta)
{
    if (theta.imag() > 0.0) throw DomainError("Jost functions are built for Im theta <= 0");
    const Lattice& lat = q.lattice();
    const Lattice ext = extended(lat);
    JostData j;
    j.theta = theta;
    j.lambda = 2.0 * (1.0 - std::cos(theta));
    j.f_plus = LatticeField(ext);
    j.f_minus = LatticeField(ext);
    const cplx a = 2.0 - j.lambda;
    const double limit = 1e300;

    // f_+ from the right edge.
    {
        auto& f = j.f_plus;
        f(ext.n_max) = std::exp(-I * theta * double(ext.n_max));
        f(ext.n_max - 1) = std::exp(-I * theta * double(ext.n_max - 1));
        for (int nu = lat.n_max; nu > lat.n_min; --nu) {
            cplx next = (a + q.field.at(nu)) * f(nu) - f(nu + 1);
            if (!(std::abs(next) < limit))
                throw NumericalFailure("Jost function f_+ overflows at site " + std::to_string(nu - 1));
            f(nu - 1) = next;
        }
        f(ext.n_min) = (a + q.field.at(lat.n_min)) * f(lat.n_min) - f(lat.n_min + 1);
    }
    // f_- from the left edge.
    {
        auto& f = j.f_minus;
        f(ext.n_min) = std::exp(I * theta * double(ext.n_min));
        f(ext.n_min + 1) = std::exp(I * theta * double(ext.n_min + 1));
        for (int nu = lat.n_min; nu < lat.n_max; ++nu) {
            cplx next = (a + q.field.at(nu)) * f(nu) - f(nu - 1);
            if (!(std::abs(next) < limit))
                throw NumericalFailure("Jost function f_- overflows at site " + std::to_string(nu + 1));
            f(nu + 1) = next;
        }
        f(ext.n_max) = (a + q.field.at(lat.n_max)) * f(lat.n_max) - f(lat.n_max - 1);
    }

    // Wronskian at every site of the extended window.
    cplx sum = 0.0;
    const int count = ext.size() - 1;
    std::vector<cplx> ws(count);
    for (int k = 0; k < count; ++k) {
        int nu = ext.n_min + k;
        ws[k] = j.f_plus.at(nu + 1) * j.f_minus.at(nu) - j.f_plus.at(nu) * j.f_minus.at(nu + 1);
        sum += ws[k];
    }
    j.wronskian = sum / double(count);
    double spread = 0.0;
    for (const auto& w : ws) spread = std::max(spread, std::abs(w - j.wronskian));
    j.wronskian_spread = spread / std::max(1.0, std::abs(j.wronskian));

    double res = 0.0;
    for (const auto* f : {&j.f_plus, &j.f_minus}) {
        double fmax = f->values.cwiseAbs().maxCoeff();
        for (int nu = lat.n_min; nu <= lat.n_max; ++nu) {
            cplx r = (2.0 + q.field.at(nu) - j.lambda) * f->at(nu) - f->at(nu - 1) - f->at(nu + 1);
            res = std::max(res, std::abs(r) / fmax);
        }
    }
    j.recursion_residual = res;
    return j;
}

ScatteringCoefficients scattering_coefficients(const JostData& j)
{
    if (std::abs(j.theta.imag()) > 0.0 || !(std::sin(j.theta.real()) != 0.0))
        throw DomainError("scattering coefficients need real theta off {0, pi}");
    const int nu = 0;
    ScatteringCoefficients s;
    s.T = -2.0 * I * std::sin(j.theta) / j.wronskian;
    s.R_plus = bracket(j.f_minus, conj_field(j.f_plus), nu) / j.wronskian;
    s.R_minus = -bracket(j.f_plus, conj_field(j.f_minus), nu) / j.wronskian;
    return s;
}

double connection_residual(const JostData& j, const ScatteringCoefficients& s)
{
    double r = 0.0;
    const auto& fp = j.f_plus.values;
    const auto& fm = j.f_minus.values;
    for (Eigen::Index i = 0; i < fp.size(); ++i) {
        cplx a = fm[i] - (std::conj(fp[i]) + s.R_plus * fp[i]) / s.T;
        cplx b = fp[i] - (std::conj(fm[i]) + s.R_minus * fm[i]) / s.T;
        r = std::max({r, std::abs(a), std::abs(b)});
    }
    return r;
}

std::vector<ScatteringRow> scattering_sweep(const Potential& q, const std::vector<double>& thetas, Exec exec)
{
    std::vector<ScatteringRow> rows(thetas.size());
    kernels::for_each_index(
        int(thetas.size()),
        [&](int k) {
            JostData j = jost(q, cplx(thetas[k], 0.0));
            rows[k] = {j.theta, j.wronskian, scattering_coefficients(j)};
        },
        exec);
    return rows;
}

ResonanceReport resonance_check(const Potential& q)
{
    ResonanceReport r;
    r.W0 = jost(q, cplx(0.0, 0.0)).wronskian;
    r.Wpi = jost(q, cplx(std::numbers::pi, 0.0)).wronskian;
    r.h2_ok = std::abs(r.W0) > 1e-6 && std::abs(r.Wpi) > 1e-6;
    return r;
}

cplx free_resolvent_kernel(cplx z, int mu, int nu, std::optional<Side> side)
{
    cplx th = theta_from_spectral(z, side);
    cplx s = std::sin(th);
    if (std::abs(s) == 0.0) throw DomainError("free resolvent kernel is singular at the band edges");
    return std::exp(-I * th * double(std::abs(mu - nu))) / (2.0 * I * s);
}

static JostData boundary_jost(const Potential& q, double lambda, Side side)
{
    if (!(lambda >= 0.0 && lambda <= 4.0)) throw DomainError("boundary resolvent needs lambda in [0,4]");
    JostData j = jost(q, theta_from_spectral(cplx(lambda, 0.0), side));
    if (std::abs(j.wronskian) < 1e-10) throw NumericalFailure("Wronskian vanishes: resolvent boundary value is singular");
    return j;
}

cplx resolvent_kernel_H(const Potential& q, double lambda, Side side, int mu, int nu)
{
    JostData j = boundary_jost(q, lambda, side);
    int hi = std::max(mu, nu), lo = std::min(mu, nu);
    return -j.f_plus.at(hi) * j.f_minus.at(lo) / j.wronskian;
}

LatticeField apply_resolvent_extended(const JostData& j, const LatticeField& u)
{
    const Lattice& ext = j.f_plus.lattice;
    const int n = ext.size();
    Eigen::VectorXcd uu(n);
    for (int i = 0; i < n; ++i) uu[i] = u.at(ext.site(i));
    const auto& fp = j.f_plus.values;
    const auto& fm = j.f_minus.values;
    // (Ru)(mu) = -(1/W)[f_+(mu) sum_{nu<=mu} f_-(nu)u(nu) + f_-(mu) sum_{nu>mu} f_+(nu)u(nu)]
    Eigen::VectorXcd left(n), right(n);
    cplx acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += fm[i] * uu[i];
        left[i] = acc;
    }
    acc = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        right[i] = acc;
        acc += fp[i] * uu[i];
    }
    LatticeField out(ext);
    for (int i = 0; i < n; ++i) out.values[i] = -(fp[i] * left[i] + fm[i] * right[i]) / j.wronskian;
    return out;
}

LatticeField apply_resolvent_extended(const Potential& q, double lambda, Side side, const LatticeField& u)
{
    require_same_lattice(q.lattice(), u.lattice);
    return apply_resolvent_extended(boundary_jost(q, lambda, side), u);
}

double resolvent_identity_residual(const Potential& q, double lambda, Side side, const LatticeField& u)
{
    LatticeField r = apply_resolvent_extended(q, lambda, side, u);
    const Lattice& lat = q.lattice();
    double s = 0.0;
    for (int nu = lat.n_min; nu <= lat.n_max; ++nu) {
        cplx v = (2.0 + q.field.at(nu) - lambda) * r.at(nu) - r.at(nu - 1) - r.at(nu + 1) - u.at(nu);
        s += std::norm(v);
    }
    return std::sqrt(s) / u.values.norm();
}

LapResult limiting_absorption_projection(const Potential& q, const LatticeField& u, const LapOptions& opts)
{
    require_same_lattice(q.lattice(), u.lattice);
    const Lattice& lat = q.lattice();
    const int n = lat.size();
    const double unorm = u.values.norm();
    if (unorm == 0.0) return {LatticeField(lat), 0, 0.0};

    // g(theta0) = (1/2 pi i)[R(-theta0) - R(theta0)] u * 2 sin(theta0), theta0 in [0, pi].
    auto integrand = [&](double t0, Eigen::VectorXcd& acc, double weight) {
        const double s = std::sin(t0);
        if (s == 0.0) return;
        JostData jp = jost(q, cplx(-t0, 0.0));
        JostData jm = jost(q, cplx(t0, 0.0));
        if (std::abs(jp.wronskian) < 1e-10)
            throw NumericalFailure("endpoint resonance suspected: Wronskian vanishes on the band");
        LatticeField rp = apply_resolvent_extended(jp, u);
        LatticeField rm = apply_resolvent_extended(jm, u);
        const cplx factor = weight * 2.0 * s / (2.0 * std::numbers::pi * I);
        for (int i = 0; i < n; ++i) acc[i] += factor * (rp.values[i + 1] - rm.values[i + 1]);
    };

    int m = opts.initial_nodes;
    double h = std::numbers::pi / m;
    // Interior nodes j = 1..m-1; the endpoints contribute zero.
    Eigen::VectorXcd sum = kernels::indexed_sum(
        m - 1, n, [&](int k, Eigen::VectorXcd& acc) { integrand((k + 1) * h, acc, 1.0); }, opts.exec);
    Eigen::VectorXcd current = h * sum;
    double change = std::numeric_limits<double>::infinity();
    while (m < opts.max_nodes) {
        const int m2 = 2 * m;
        const double h2 = std::numbers::pi / m2;
        Eigen::VectorXcd odd = kernels::indexed_sum(
            m, n, [&](int k, Eigen::VectorXcd& acc) { integrand((2 * k + 1) * h2, acc, 1.0); }, opts.exec);
        sum += odd;
        Eigen::VectorXcd next = h2 * sum;
        change = (next - current).norm() / unorm;
        current = std::move(next);
        m = m2;
        if (change <= opts.tolerance) break;
    }
    if (change > opts.tolerance)
        throw NumericalFailure("limiting-absorption quadrature did not converge (endpoint resonance suspected)");
    return {LatticeField(lat, current), m, change};
}

}  // namespace dnls
