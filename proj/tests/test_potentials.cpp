#include "doctest.h"

#include <cmath>

#include "dnls/potentials.hpp"
#include "dnls/tridiagonal.hpp"

using namespace dnls;

namespace {

// Independent double sum over an explicit support list.
double moment_oracle(const std::vector<std::pair<int, double>>& s)
{
    double m = 0.0;
    for (auto [a, qa] : s)
        for (auto [b, qb] : s) m += std::abs(a - b) * qa * qb;
    return m;
}

Potential from_support(const std::vector<std::pair<int, double>>& s, const Lattice& lat = Lattice::symmetric(64))
{
    Potential q;
    q.field = RealField(lat);
    for (auto [n, v] : s) q.field(n) = v;
    q.decay_rate = std::numeric_limits<double>::infinity();
    return q;
}

}  // namespace

TEST_CASE("moment functional against the direct double sum")
{
    const std::vector<std::pair<int, double>> qstar{{-1, -0.5}, {0, 1.0}, {1, -0.5}};
    CHECK(moment_oracle(qstar) == doctest::Approx(-1.0));
    CHECK(moment_functional(make_potential("qstar", 1.0)) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(moment_functional(make_potential("delta", 1.0)) == 0.0);
    CHECK(moment_functional(make_potential("pair", 1.0)) == doctest::Approx(moment_oracle({{0, 1.0}, {1, 1.0}})));
    CHECK(moment_functional(make_potential("pair", 1.0)) == doctest::Approx(2.0));
}

TEST_CASE("zero-sum check")
{
    CHECK(zero_sum_check(make_potential("qstar", 1.0)));
    CHECK_FALSE(zero_sum_check(make_potential("delta", 1.0)));
    std::vector<std::pair<int, double>> s{{-2, 0.7}, {0, 1.3}, {3, -0.4}};
    double mean = 0.0;
    for (auto& p : s) mean += p.second / 3.0;
    for (auto& p : s) p.second -= mean;
    CHECK(zero_sum_check(from_support(s)));
}

TEST_CASE("z -> 0- limit equals minus half the moment")
{
    const auto seq = default_a2_sequence();
    CHECK(lemma_a2_limit(make_potential("qstar", 1.0), seq) == doctest::Approx(0.5).epsilon(1e-6));
    for (const char* p : {"dipole", "tripole", "wide"}) {
        const Potential q = make_potential(p, 1.0);
        CHECK(std::abs(lemma_a2_limit(q, seq) + 0.5 * moment_functional(q)) <= 1e-6);
    }
    // Cross-check the limit against the raw pairing at a small z.
    const Potential d = make_potential("dipole", 1.0);
    CHECK(free_resolvent_pairing(d, -1e-10) == doctest::Approx(-0.5 * moment_functional(d)).epsilon(1e-4));
    CHECK_THROWS_AS(lemma_a2_limit(make_potential("delta", 1.0), seq), DomainError);
}

TEST_CASE("small-coupling spectrum prediction")
{
    const Potential shape = make_potential("qstar", 1.0);
    const auto p0 = predict_small_eps_spectrum(shape, 0.0);
    CHECK(p0.E0_pred == 0.0);
    CHECK(p0.E1_pred == 4.0);
    const auto p3 = predict_small_eps_spectrum(shape, 0.3);
    CHECK(p3.E0_pred == doctest::Approx(2.0 * (std::cosh(0.0225) - 1.0)).epsilon(1e-12));
    CHECK(p3.E0_pred == doctest::Approx(5.0626e-4).epsilon(1e-4));
    const auto p1 = predict_small_eps_spectrum(shape, 0.1);
    CHECK(p1.E0_pred == doctest::Approx(6.25e-6).epsilon(1e-3));
    CHECK_THROWS_AS(predict_small_eps_spectrum(make_potential("pair", 1.0), 0.1), DomainError);
}

TEST_CASE("prediction against a dense eigensolve at eps = 0.1")
{
    // Decay length about 1/sqrt(6e-6) = 400 sites.
    const Potential q = make_potential("qstar", 0.1, Lattice::symmetric(4096));
    const double lowest = -lowest_eigenpair(q).value;
    const double pred = predict_small_eps_spectrum(make_potential("qstar", 1.0), 0.1).E0_pred;
    CHECK(lowest == doctest::Approx(pred).epsilon(0.3));
}

TEST_CASE("hypotheses for the canonical and contrast operators")
{
    const auto r = validate_hypotheses(make_potential("qstar", 1.0), 0.3);
    CHECK(r.h1_ok);
    CHECK(r.h2_ok);
    CHECK(r.h3_ok);
    CHECK(r.count_below_zero == 1);
    CHECK(r.count_above_four == 1);
    CHECK(r.E0 > 0.0);
    CHECK(r.E1 > 4.0);

    const auto z = validate_hypotheses(make_potential("zero", 1.0), 1.0);
    CHECK_FALSE(z.h3_ok);
    CHECK(z.count_below_zero + z.count_above_four == 0);

    const auto c = validate_hypotheses(make_potential("delta", 1.0), -0.5, Lattice::symmetric(256));
    CHECK_FALSE(c.h3_ok);
    CHECK(c.count_below_zero == 1);
    CHECK(c.count_above_four == 0);
}

TEST_CASE("reflection symmetry of the spectrum")
{
    const Lattice lat = Lattice::symmetric(100);
    const Potential q = make_potential("wide", 0.4, lat);
    const Potential mq = scaled(make_potential("wide", 1.0, lat), -0.4);
    const auto a = eigensystem(SymTridiagonal::schrodinger(q.field)).values;
    const auto b = eigensystem(SymTridiagonal::schrodinger(mq.field)).values;
    const int n = int(a.size());
    double err = 0.0;
    for (int k = 0; k < n; ++k) err = std::max(err, std::abs(b[k] - (4.0 - a[n - 1 - k])));
    CHECK(err <= 1e-10);
}

TEST_CASE("eigenvalue count is stable under window doubling")
{
    const Potential shape = make_potential("qstar", 1.0);
    const auto a = validate_hypotheses(shape, 0.3, Lattice::symmetric(512));
    const auto b = validate_hypotheses(shape, 0.3, Lattice::symmetric(1024));
    CHECK(a.eigenvalues.size() == b.eigenvalues.size());
    CHECK(a.E0 == doctest::Approx(b.E0).epsilon(1e-6));
}
