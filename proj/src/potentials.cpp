#include "dnls/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "dnls/scattering.hpp"
#include "dnls/tridiagonal.hpp"

namespace dnls {

Potential make_potential(const std::string& profile, double eps, const Lattice& lat)
{
    Potential q;
    q.field = RealField(lat);
    q.eps = eps;
    q.profile = profile;
    auto set = [&](int site, double v) { q.field(site) = eps * v; };
    if (profile == "zero") {
    } else if (profile == "qstar") {
        set(-1, -0.5);
        set(0, 1.0);
        set(1, -0.5);
    } else if (profile == "delta") {
        set(0, 1.0);
    } else if (profile == "dipole") {
        set(0, 1.0);
        set(1, -1.0);
    } else if (profile == "pair") {
        set(0, 1.0);
        set(1, 1.0);
    } else if (profile == "tripole") {
        set(-1, 1.0);
        set(0, -2.0);
        set(1, 1.0);
    } else if (profile == "wide") {
        set(-2, -0.25);
        set(-1, -0.5);
        set(0, 1.25);
        set(1, -0.25);
        set(2, -0.25);
    } else {
        throw DomainError("unknown potential profile '" + profile + "'");
    }
    return q;
}

Potential on_lattice(const Potential& q, const Lattice& lat)
{
    Potential out = q;
    out.field = RealField(lat);
    for (int i = 0; i < lat.size(); ++i) out.field.values[i] = q.field.at(lat.site(i));
    return out;
}

Potential scaled(const Potential& shape, double eps)
{
    Potential q = shape;
    q.field.values *= eps;
    q.eps = shape.eps * eps;
    return q;
}

int support_radius(const Potential& q)
{
    int r = -1;
    const Lattice& lat = q.lattice();
    for (int i = 0; i < lat.size(); ++i)
        if (std::abs(q.field.values[i]) > 1e-14) r = std::max(r, std::abs(lat.site(i)));
    return r;
}

namespace {

struct SupportPoint {
    int site;
    double value;
};

std::vector<SupportPoint> support(const Potential& q)
{
    std::vector<SupportPoint> pts;
    const Lattice& lat = q.lattice();
    for (int i = 0; i < lat.size(); ++i)
        if (q.field.values[i] != 0.0) pts.push_back({lat.site(i), q.field.values[i]});
    return pts;
}

}  // namespace

double moment_functional(const Potential& q)
{
    auto pts = support(q);
    double s = 0.0;
    for (const auto& a : pts)
        for (const auto& b : pts) s += std::abs(a.site - b.site) * a.value * b.value;
    return s;
}

bool zero_sum_check(const Potential& q, double tol) { return std::abs(q.field.values.sum()) <= tol; }

double free_resolvent_pairing(const Potential& q, double z)
{
    if (!(z < 0.0)) throw DomainError("free_resolvent_pairing needs z < 0");
    const double kappa = std::acosh(1.0 - 0.5 * z);
    const double denom = 2.0 * std::sinh(kappa);
    auto pts = support(q);
    // e^{-kappa d} = 1 + expm1(-kappa d) splits off the (sum q)^2 pole.
    double s = 0.0;
    for (const auto& a : pts)
        for (const auto& b : pts) s += a.value * b.value * std::expm1(-kappa * std::abs(a.site - b.site));
    double total = q.field.values.sum();
    return s / denom + total * total / denom;
}

std::vector<double> default_a2_sequence()
{
    std::vector<double> zs;
    for (int k = 1; k <= 8; ++k) zs.push_back(-std::pow(10.0, -k));
    return zs;
}

double lemma_a2_limit(const Potential& q, const std::vector<double>& z_sequence)
{
    if (!zero_sum_check(q))
        throw DomainError("sum of q is nonzero: <R(z)q,q> diverges as z -> 0^-");
    if (z_sequence.size() < 3) throw DomainError("need at least three z values for extrapolation");
    std::vector<double> zs = z_sequence;
    std::sort(zs.begin(), zs.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    double k[3], v[3];
    for (int i = 0; i < 3; ++i) {
        k[i] = std::acosh(1.0 - 0.5 * zs[i]);
        v[i] = free_resolvent_pairing(q, zs[i]);
    }
    // Neville extrapolation of the quadratic through (k_i, v_i) to k = 0.
    double p01 = (k[1] * v[0] - k[0] * v[1]) / (k[1] - k[0]);
    double p12 = (k[2] * v[1] - k[1] * v[2]) / (k[2] - k[1]);
    return (k[2] * p01 - k[0] * p12) / (k[2] - k[0]);
}

SpectrumPrediction predict_small_eps_spectrum(const Potential& shape, double eps)
{
    if (eps == 0.0) return {0.0, 4.0};
    const double m = moment_functional(shape);
    if (!(m < 0.0)) throw DomainError("small-eps prediction needs a negative moment functional");
    // theta = i (eps^2/4) m, z = 2(1 - cos theta), E0 = -z. The reflected
    // problem q -> -q has the same (quadratic) moment.
    const double y = 0.25 * eps * eps * m;
    const double e0 = 2.0 * (std::cosh(y) - 1.0);
    return {e0, 4.0 + e0};
}

ExtremeEigenpair lowest_eigenpair(const Potential& q)
{
    auto t = SymTridiagonal::schrodinger(q.field);
    ExtremeEigenpair e;
    e.value = eigenvalue_by_index(t, 0);
    Eigen::VectorXd v = inverse_iteration(t, e.value);
    if (v[q.lattice().index(0)] < 0) v = -v;
    e.vector = RealField(q.lattice(), v);
    return e;
}

ExtremeEigenpair highest_eigenpair(const Potential& q)
{
    auto t = SymTridiagonal::schrodinger(q.field);
    ExtremeEigenpair e;
    e.value = eigenvalue_by_index(t, t.size() - 1);
    Eigen::VectorXd v = inverse_iteration(t, e.value);
    if (v[q.lattice().index(0)] < 0) v = -v;
    e.vector = RealField(q.lattice(), v);
    return e;
}

namespace {

struct WindowSpectrum {
    int below = 0;
    int above = 0;
    double lowest = 0.0;
    double highest = 0.0;
};

WindowSpectrum window_spectrum(const Potential& q)
{
    auto t = SymTridiagonal::schrodinger(q.field);
    WindowSpectrum s;
    s.below = count_below(t, 0.0);
    // Eigenvalues > 4: N minus the number <= 4 (nudged to absorb rounding).
    s.above = t.size() - count_below(t, 4.0 + 1e-15);
    s.lowest = eigenvalue_by_index(t, 0);
    s.highest = eigenvalue_by_index(t, t.size() - 1);
    return s;
}

}  // namespace

HypothesisReport validate_hypotheses(const Potential& shape, double eps, const std::optional<Lattice>& window)
{
    HypothesisReport rep;
    rep.eps = eps;
    Lattice lat = window.value_or(shape.lattice());

    try {
        rep.prediction = predict_small_eps_spectrum(shape, eps);
        if (rep.prediction->E0_pred > 0.0) {
            int need = int(std::ceil(8.0 / std::sqrt(rep.prediction->E0_pred)));
            int half = std::max(lat.n_max, (need / 2 + 63) / 64 * 64);
            half = std::max(half, -lat.n_min);
            lat = Lattice::symmetric(half);
        }
    } catch (const DomainError&) {
        rep.prediction.reset();
    }
    rep.window = lat;

    Potential q = scaled(on_lattice(shape, lat), eps);

    // Decay: compact support inside the inner quarter of the window counts as
    // faster than any exponential; otherwise fit the tail.
    int rad = support_radius(q);
    rep.compact_support = rad >= 0 && rad <= lat.n_max / 4;
    rep.decay_constant = 0.0;
    for (int i = 0; i < lat.size(); ++i)
        rep.decay_constant = std::max(rep.decay_constant, std::abs(q.field.values[i]) * std::exp(std::abs(lat.site(i))));
    if (rad < 0) {
        rep.h1_ok = true;
        rep.compact_support = true;
        rep.decay_rate = std::numeric_limits<double>::infinity();
    } else {
        auto fit = fit_exponential_decay(q.field);
        rep.decay_rate = rep.compact_support ? std::numeric_limits<double>::infinity() : fit.rate;
        rep.h1_ok = rep.compact_support || (fit.ok && fit.rate >= 1.0 - 1e-9);
    }

    // Band edges are not resonances.
    auto res = resonance_check(q);
    rep.W0 = res.W0;
    rep.Wpi = res.Wpi;
    rep.h2_ok = res.h2_ok;

    // One eigenvalue below the band and one above, with window doubling as the
    // truncation-error estimate.
    WindowSpectrum s1 = window_spectrum(q);
    Lattice big = Lattice::symmetric(2 * lat.n_max);
    WindowSpectrum s2 = window_spectrum(scaled(on_lattice(shape, big), eps));
    rep.truncation_error_low = std::abs(s1.lowest - s2.lowest);
    rep.truncation_error_high = std::abs(s1.highest - s2.highest);
    rep.count_below_zero = s1.below;
    rep.count_above_four = s1.above;

    if (s1.below > 0 && std::abs(s1.lowest) <= 10.0 * rep.truncation_error_low)
        throw Indeterminate("eigenvalue below 0 is within the truncation error of the band edge: grow window");
    if (s1.above > 0 && std::abs(s1.highest - 4.0) <= 10.0 * rep.truncation_error_high)
        throw Indeterminate("eigenvalue above 4 is within the truncation error of the band edge: grow window");
    if (s1.below != s2.below || s1.above != s2.above)
        throw Indeterminate("eigenvalue count changes under window doubling: grow window");

    auto t = SymTridiagonal::schrodinger(q.field);
    for (int k = 0; k < s1.below; ++k) rep.eigenvalues.push_back(eigenvalue_by_index(t, k));
    for (int k = t.size() - s1.above; k < t.size(); ++k) rep.eigenvalues.push_back(eigenvalue_by_index(t, k));
    if (s1.below >= 1) rep.E0 = -s1.lowest;
    if (s1.above >= 1) rep.E1 = s1.highest;
    rep.h3_ok = s1.below == 1 && s1.above == 1;
    return rep;
}

nlohmann::json to_json(const HypothesisReport& r)
{
    auto num = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        if (std::isnan(x)) return nullptr;
        return x > 0 ? "inf" : "-inf";
    };
    nlohmann::json j;
    j["eps"] = r.eps;
    j["window"] = {r.window.n_min, r.window.n_max};
    j["h1"] = {{"ok", r.h1_ok},
               {"compact_support", r.compact_support},
               {"decay_rate", num(r.decay_rate)},
               {"decay_constant", r.decay_constant}};
    j["h2"] = {{"ok", r.h2_ok},
               {"W0", {r.W0.real(), r.W0.imag()}},
               {"Wpi", {r.Wpi.real(), r.Wpi.imag()}}};
    j["h3"] = {{"ok", r.h3_ok},
               {"count_below_zero", r.count_below_zero},
               {"count_above_four", r.count_above_four},
               {"eigenvalues", r.eigenvalues},
               {"truncation_error_low", r.truncation_error_low},
               {"truncation_error_high", r.truncation_error_high}};
    j["E0"] = num(r.E0);
    j["E1"] = num(r.E1);
    if (r.prediction) j["prediction"] = {{"E0_pred", r.prediction->E0_pred}, {"E1_pred", r.prediction->E1_pred}};
    j["all_ok"] = r.all_ok();
    return j;
}

}  // namespace dnls
