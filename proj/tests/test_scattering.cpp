#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dnls/scattering.hpp"
#include "dnls/tridiagonal.hpp"
#include "fixtures.hpp"

using namespace dnls;
using std::numbers::pi;

TEST_CASE("free Jost functions are plane waves")
{
    const Potential q = make_potential("zero", 1.0, Lattice::symmetric(40));
    const JostData j = jost(q, pi / 3);
    CHECK(std::abs(j.wronskian - cplx(0.0, -2.0 * std::sin(pi / 3))) <= 1e-12);
    double err = 0.0;
    for (int n = -40; n <= 40; ++n) {
        err = std::max(err, std::abs(j.f_plus.at(n) - std::polar(1.0, -n * pi / 3)));
        err = std::max(err, std::abs(j.f_minus.at(n) - std::polar(1.0, n * pi / 3)));
    }
    CHECK(err <= 1e-12);
    const auto s = scattering_coefficients(j);
    CHECK(std::abs(s.T - 1.0) <= 1e-12);
    CHECK(std::abs(s.R_plus) <= 1e-12);
}

TEST_CASE("Jost recursion and Wronskian spread")
{
    const Potential q = make_potential("qstar", 0.3, Lattice::symmetric(64));
    const JostData j = jost(q, pi / 2);
    CHECK(j.recursion_residual <= 1e-10);
    CHECK(j.wronskian_spread <= 1e-9);
    // Independent residual through apply_H on the interior.
    LatticeField f(q.lattice());
    for (int n = -64; n <= 64; ++n) f(n) = j.f_plus.at(n);
    const LatticeField hf = apply_H(q, f);
    double res = 0.0;
    for (int n = -63; n <= 63; ++n) res = std::max(res, std::abs(hf.at(n) - j.lambda * f.at(n)));
    CHECK(res <= 1e-10);

    const JostData c = jost(q, cplx(0.0, -0.5));
    CHECK(std::abs(c.f_plus.at(40)) < std::abs(c.f_plus.at(20)));
    CHECK(std::abs(c.f_plus.at(-40)) > std::abs(c.f_plus.at(-20)));
}

TEST_CASE("connection identity on the band")
{
    const Potential q = make_potential("qstar", 0.3, Lattice::symmetric(64));
    for (int k = 1; k <= 15; ++k) {
        const JostData j = jost(q, k * pi / 16);
        CHECK(connection_residual(j, scattering_coefficients(j)) <= 1e-8);
    }
}

TEST_CASE("endpoint resonances")
{
    const auto free = resonance_check(make_potential("zero", 1.0, Lattice::symmetric(64)));
    CHECK(std::abs(free.W0) <= 1e-12);
    CHECK_FALSE(free.h2_ok);
    CHECK(resonance_check(make_potential("qstar", 0.3, Lattice::symmetric(64))).h2_ok);
    CHECK(resonance_check(make_potential("delta", -0.5, Lattice::symmetric(64))).h2_ok);
}

TEST_CASE("free resolvent kernel values")
{
    const double k = std::acosh(1.5);
    CHECK(std::abs(free_resolvent_kernel(-1.0, 0, 0) - 1.0 / std::sqrt(5.0)) <= 1e-12);
    CHECK(std::abs(free_resolvent_kernel(-1.0, 3, 4) - std::exp(-k) / std::sqrt(5.0)) <= 1e-12);
    CHECK(std::abs(free_resolvent_kernel(-1e6, 0, 0)) < 1e-5);
    CHECK_THROWS_AS(free_resolvent_kernel(2.0, 0, 0), DomainError);

    // (-Delta - z) applied in mu to the kernel row returns delta.
    const cplx z(-0.7, 0.4);
    for (int mu = -3; mu <= 3; ++mu) {
        const cplx v = 2.0 * free_resolvent_kernel(z, mu, 0) - free_resolvent_kernel(z, mu - 1, 0) -
                       free_resolvent_kernel(z, mu + 1, 0) - z * free_resolvent_kernel(z, mu, 0);
        CHECK(std::abs(v - (mu == 0 ? 1.0 : 0.0)) <= 1e-10);
    }
}

TEST_CASE("resolvent of H on the band")
{
    const Potential zero = make_potential("zero", 1.0, Lattice::symmetric(32));
    for (Side s : {Side::Plus, Side::Minus})
        CHECK(std::abs(resolvent_kernel_H(zero, 1.3, s, 2, -1) - free_resolvent_kernel(1.3, 2, -1, s)) <= 1e-12);

    const Potential q = make_potential("qstar", 0.3, Lattice::symmetric(64));
    CHECK(std::abs(resolvent_kernel_H(q, 2.0, Side::Plus, 3, -2) - resolvent_kernel_H(q, 2.0, Side::Plus, -2, 3)) <=
          1e-10);
    LatticeField u(q.lattice());
    for (int n = -3; n <= 3; ++n) u(n) = cplx(1.0 + n, 0.5 * n * n);
    CHECK(resolvent_identity_residual(q, 2.0, Side::Plus, u) <= 1e-8);
    CHECK(resolvent_identity_residual(q, 0.7, Side::Minus, u) <= 1e-8);
}

TEST_CASE("limiting-absorption projection against the eigensolve")
{
    // The lower bound state decays over about 52 sites; the window must hold it to 1e-6.
    const Lattice lat = Lattice::symmetric(1024);
    const Potential q = make_potential("qstar", 0.3, lat);
    const auto lo = lowest_eigenpair(q);
    const auto hi = highest_eigenpair(q);

    LatticeField b = to_complex(lo.vector);
    CHECK(limiting_absorption_projection(q, b).projection.values.norm() <= 1e-6);

    const LatticeField d = delta_field<cplx>(lat, 0);
    LatticeField expect = d;
    expect.values -= lo.vector.at(0) * lo.vector.values.cast<cplx>();
    expect.values -= hi.vector.at(0) * hi.vector.values.cast<cplx>();
    const LapResult r = limiting_absorption_projection(q, d);
    CHECK((r.projection.values - expect.values).norm() <= 1e-6);
}

TEST_CASE("limiting-absorption projection with a single bound state")
{
    // Every nonzero weak potential binds on the lattice, so the bound-state
    // free case is replaced by the one-eigenvalue operator -Delta - 0.5 delta_0.
    const Lattice lat = Lattice::symmetric(128);
    const Potential q = make_potential("delta", -0.5, lat);
    const auto lo = lowest_eigenpair(q);
    REQUIRE(lo.value < 0.0);
    REQUIRE(highest_eigenpair(q).value <= 4.0);
    LatticeField u(lat);
    for (int n = -2; n <= 2; ++n) u(n) = cplx(1.0, n);
    const cplx c = u.values.dot(lo.vector.values.cast<cplx>());
    LatticeField expect = u;
    expect.values -= std::conj(c) * lo.vector.values.cast<cplx>();
    const LapResult r = limiting_absorption_projection(q, u);
    CHECK((r.projection.values - expect.values).norm() <= 1e-6 * u.values.norm());
}

TEST_CASE("scattering sweep: serial and parallel agree")
{
    const Potential q = make_potential("qstar", 0.3, Lattice::symmetric(64));
    std::vector<double> th;
    for (int k = 1; k < 50; ++k) th.push_back(k * pi / 50);
    const auto a = scattering_sweep(q, th, Exec::Serial);
    const auto b = scattering_sweep(q, th, Exec::Parallel);
    REQUIRE(a.size() == b.size());
    for (size_t k = 0; k < a.size(); ++k) CHECK(a[k].coeffs.T == b[k].coeffs.T);
}
