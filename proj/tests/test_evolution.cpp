#include "doctest.h"

#include <cmath>

#include "dnls/evolution.hpp"
#include "dnls/ground_state.hpp"
#include "fixtures.hpp"

using namespace dnls;

TEST_CASE("free kernel: initial value, unitarity and Bessel oracle")
{
    CHECK(free_propagator_kernel(0.0, 0) == cplx(1.0));
    CHECK(free_propagator_kernel(0.0, 3) == cplx(0.0));
    const Lattice lat = Lattice::symmetric(200);
    const LatticeField k = free_propagator_kernel(10.0, lat);
    CHECK(std::abs(k.values.norm() - 1.0) <= 1e-12);
    for (int n : {-7, 0, 4, 19}) {
        const cplx want = std::exp(cplx(0.0, -20.0)) * std::pow(cplx(0.0, 1.0), std::abs(n)) *
                          std::cyl_bessel_j(double(std::abs(n)), 20.0);
        CHECK(std::abs(k.at(n) - want) <= 1e-12);
    }
    const auto seq = bessel_j_sequence(30, 7.5);
    for (int n = 0; n <= 30; ++n) CHECK(std::abs(seq[n] - std::cyl_bessel_j(double(n), 7.5)) <= 1e-13);
}

TEST_CASE("linear propagator: eigenvector phase, unitarity, free oracle")
{
    const Lattice lat = Lattice::symmetric(100);
    const Potential q = make_potential("qstar", 0.3, lat);
    const Propagator p(q);
    const int k = 17;
    const LatticeField e(lat, p.eigenvectors().col(k).cast<cplx>());
    const LatticeField pe = p.apply(3.0, e);
    CHECK((pe.values - std::exp(cplx(0.0, -3.0 * p.eigenvalues()[k])) * e.values).norm() <= 1e-12);

    const LatticeField u = fixture::random_field(lat, 4);
    CHECK(std::abs(p.apply(7.0, u).values.norm() - u.values.norm()) <= 1e-12 * u.values.norm());

    const Potential zero = make_potential("zero", 1.0, lat);
    LatticeField v(lat);
    for (int n = -5; n <= 5; ++n) v(n) = cplx(std::cos(n), 0.2 * n);
    const double t = 5.0;
    CHECK((linear_propagator_H(zero, t, v).values - free_convolution(t, v).values).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Chebyshev and eigenbasis paths agree")
{
    const Lattice lat = Lattice::symmetric(128);
    const Potential q = make_potential("qstar", 0.3, lat);
    const Propagator p(q);
    const LatticeField u = fixture::random_field(lat, 6);
    for (double t : {0.005, 0.05, -0.03, 1.0}) {
        PropagatorPlan eig;
        eig.t = t;
        eig.phases = p.phases(t);
        const LatticeField a = p.apply(eig, u), b = p.apply(p.chebyshev_plan(t), u);
        CHECK((a.values - b.values).norm() <= 1e-13 * u.values.norm());
    }
}

TEST_CASE("split step: zero data, tiny data, reversibility, isometry")
{
    const Lattice lat = Lattice::symmetric(100);
    const Potential zero = make_potential("zero", 1.0, lat);
    CHECK(step(zero, LatticeField(lat), 0.01).values.norm() == 0.0);

    LatticeField d = delta_field<cplx>(lat, 0, cplx(1e-4));
    const Propagator p(zero);
    LatticeField u = d;
    for (int s = 0; s < 100; ++s) u = step(p, u, 0.01);
    CHECK((u.values - free_convolution(1.0, d).values).cwiseAbs().maxCoeff() <= 1e-10);

    const Potential q = make_potential("qstar", 0.3, lat);
    const Propagator pq(q);
    LatticeField w = fixture::random_field(lat, 9);
    w.values *= 0.5 / w.values.norm();
    const LatticeField fwd = step(pq, w, 0.02);
    CHECK(std::abs(fwd.values.norm() - w.values.norm()) <= 1e-12);
    CHECK((step(pq, fwd, -0.02).values - w.values).norm() <= 1e-10);

    const LatticeField nl = nonlinear_substep(w, 0.3);
    CHECK((nl.values.cwiseAbs() - w.values.cwiseAbs()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(step(pq, w, 0.2), DomainError);
}

TEST_CASE("standing wave keeps its modulus and rotates as e^{i omega t}")
{
    const auto& b = fixture::branch();
    const double w = fixture::omega0(b);
    const GroundStatePoint pt = b.evaluate(w);
    const Propagator p(b.q);
    LatticeField u = to_complex(pt.phi);
    double dev = 0.0;
    const double dt = 0.01;
    for (int s = 1; s <= 1000; ++s) {
        u = step(p, u, dt);
        dev = std::max(dev, (u.values.cwiseAbs() - pt.phi.values).cwiseAbs().maxCoeff());
    }
    CHECK(dev <= 1e-9);
    const cplx ph = pt.phi.values.cast<cplx>().dot(u.values) / pt.phi.values.squaredNorm();
    // Phase e^{i omega t} at t = 10 modulo round-off of the splitting.
    CHECK(std::abs(ph - std::exp(cplx(0.0, w * 10.0))) <= 1e-6);
}

TEST_CASE("conserved quantities of a delta")
{
    const Lattice lat = Lattice::symmetric(40);
    const auto c = conserved_quantities(make_potential("zero", 1.0, lat), delta_field<cplx>(lat, 0));
    CHECK(c.mass == doctest::Approx(1.0));
    CHECK(c.energy == doctest::Approx(1.75));
}

TEST_CASE("evolve records mass and energy at the cadence")
{
    const auto& b = fixture::branch();
    const Propagator p(b.q);
    LatticeField u0 = to_complex(b.evaluate(fixture::omega0(b)).phi);
    for (int n = -5; n <= 5; ++n) u0(n) += cplx(1e-3, -2e-3 * n);
    const Trajectory tr = evolve(b.q, p, u0, {0.005, 5.0, 0.5, false});
    CHECK(tr.times.size() == 11);
    CHECK(tr.times.back() == doctest::Approx(5.0));
    CHECK(tr.max_relative_mass_drift() <= 1e-12);
    CHECK(tr.max_relative_energy_drift() <= 1e-8);
}

TEST_CASE("second-order convergence of the splitting")
{
    const auto& b = fixture::branch(64);
    const Propagator p(b.q);
    LatticeField u0 = to_complex(b.evaluate(fixture::omega0(b)).phi);
    for (int n = -3; n <= 3; ++n) u0(n) += cplx(0.05, 0.02 * n);
    auto run = [&](double dt) {
        LatticeField u = u0;
        const int steps = int(std::lround(1.0 / dt));
        for (int s = 0; s < steps; ++s) u = step(p, u, dt);
        return u;
    };
    const LatticeField ref = run(1e-4);
    const double e1 = (run(0.02).values - ref.values).norm();
    const double e2 = (run(0.01).values - ref.values).norm();
    CHECK(e1 / e2 >= 3.5);
    CHECK(e1 / e2 <= 4.5);
}

TEST_CASE("decay exponent of the free lattice")
{
    const Lattice lat = Lattice::symmetric(600);
    const Propagator p(make_potential("zero", 1.0, lat));
    const auto fit = decay_exponent(p, delta_field<cplx>(lat, 0), log_spaced(20.0, 200.0, 8));
    CHECK(fit.exponent == doctest::Approx(-1.0 / 3.0).epsilon(0.15));
    CHECK_THROWS_AS(decay_exponent(p, delta_field<cplx>(lat, 0), {10.0}), DomainError);
}
