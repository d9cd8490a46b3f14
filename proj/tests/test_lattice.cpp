#include "doctest.h"

#include <cmath>

#include "dnls/lattice.hpp"
#include "fixtures.hpp"

using namespace dnls;

TEST_CASE("laplacian stencil on a delta")
{
    const Lattice lat = Lattice::symmetric(20);
    const LatticeField d = apply_laplacian(delta_field<cplx>(lat, 0));
    CHECK(d.at(-1) == cplx(1.0));
    CHECK(d.at(0) == cplx(-2.0));
    CHECK(d.at(1) == cplx(1.0));
    CHECK(d.at(2) == cplx(0.0));
}

TEST_CASE("laplacian annihilates constants in the interior and sees the Dirichlet ghosts")
{
    const Lattice lat = Lattice::symmetric(20);
    RealField one(lat, Eigen::VectorXd::Ones(lat.size()));
    const RealField d = apply_laplacian(one);
    for (int n = -19; n <= 19; ++n) CHECK(d.at(n) == 0.0);
    CHECK(d.at(-20) == -1.0);
    CHECK(d.at(20) == -1.0);
}

TEST_CASE("plane-wave symbol")
{
    const Lattice lat = Lattice::symmetric(40);
    for (double theta : {0.3, 1.1, 2.9}) {
        LatticeField u(lat);
        for (int n = lat.n_min; n <= lat.n_max; ++n) u(n) = std::polar(1.0, n * theta);
        const LatticeField d = apply_laplacian(u);
        double err = 0.0;
        for (int n = lat.n_min + 1; n < lat.n_max; ++n)
            err = std::max(err, std::abs(d.at(n) + 2.0 * (1.0 - std::cos(theta)) * u.at(n)));
        CHECK(err <= 1e-12);
    }
}

TEST_CASE("apply_H stencils")
{
    const Lattice lat = Lattice::symmetric(20);
    const RealField zero(lat);
    const RealField d0 = delta_field<double>(lat, 0);
    const RealField a = apply_H(zero, d0);
    CHECK(a.at(-1) == -1.0);
    CHECK(a.at(0) == 2.0);
    CHECK(a.at(1) == -1.0);
    const RealField b = apply_H(d0, d0);
    CHECK(b.at(0) == 3.0);
    CHECK_THROWS_AS(apply_H(RealField(Lattice::symmetric(21)), d0), LatticeMismatch);
}

TEST_CASE("H is linear and symmetric for a real potential")
{
    const Lattice lat = Lattice::symmetric(64);
    RealField q(lat);
    q(-1) = -0.15;
    q(0) = 0.3;
    q(1) = -0.15;
    const LatticeField u = fixture::random_field(lat, 1), v = fixture::random_field(lat, 2);
    const cplx al(0.3, -1.2), be(2.0, 0.5);
    LatticeField w(lat, al * u.values + be * v.values);
    const double lin = (apply_H(q, w).values - al * apply_H(q, u).values - be * apply_H(q, v).values).norm();
    CHECK(lin <= 1e-12 * w.values.norm());
    const double sym = std::abs(inner(apply_H(q, u), v) - inner(u, apply_H(q, v)));
    CHECK(sym <= 1e-12 * u.values.norm() * v.values.norm());
    CHECK(std::abs(inner(apply_H(q, u), u).imag()) <= 1e-12 * u.values.squaredNorm());
}

TEST_CASE("weighted norms")
{
    const Lattice lat = Lattice::symmetric(40);
    const LatticeField d0 = delta_field<cplx>(lat, 0);
    CHECK(weighted_norm(d0, {2.0, 3.0}) == doctest::Approx(1.0));
    CHECK(weighted_norm(d0, {1.0, -2.0}) == doctest::Approx(1.0));
    CHECK(weighted_norm(d0, WeightedNormSpec::sup(5.0)) == doctest::Approx(1.0));
    CHECK(weighted_norm(delta_field<cplx>(lat, 1), {2.0, 1.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // Geometric series: sum 4^{-|n|} = 1 + 2 (1/4)/(1 - 1/4) = 5/3, tail below 4^-40.
    LatticeField g(lat);
    for (int n = lat.n_min; n <= lat.n_max; ++n) g(n) = std::pow(2.0, -std::abs(n));
    CHECK(weighted_norm(g, {2.0, 0.0}) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));

    CHECK_THROWS_AS(weighted_norm(g, {0.5, 0.0}), DomainError);
}

TEST_CASE("weighted norm is monotone in sigma")
{
    const Lattice lat = Lattice::symmetric(50);
    const LatticeField u = fixture::random_field(lat, 3);
    double prev = 0.0;
    for (double s : {-2.0, -1.0, 0.0, 0.5, 1.0, 2.0}) {
        const double v = weighted_norm(u, {2.0, s});
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("exponential decay fit")
{
    const Lattice lat = Lattice::symmetric(30);
    RealField u(lat);
    for (int n = lat.n_min; n <= lat.n_max; ++n) u(n) = std::exp(-std::abs(n));
    const DecayFit f = fit_exponential_decay(u);
    CHECK(f.ok);
    CHECK(f.rate == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.prefactor == doctest::Approx(1.0).epsilon(1e-6));

    RealField one(lat, Eigen::VectorXd::Ones(lat.size()));
    CHECK_FALSE(fit_exponential_decay(one).ok);
    CHECK_THROWS_AS(fit_exponential_decay(RealField(lat)), DomainError);
}
