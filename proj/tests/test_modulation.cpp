#include "doctest.h"

#include <cmath>
#include <numbers>

#include "dnls/modulation.hpp"
#include "fixtures.hpp"

using namespace dnls;

namespace {

LatticeField rotate(const LatticeField& u, double a)
{
    return LatticeField(u.lattice, std::exp(cplx(0.0, a)) * u.values);
}

double reconstruction(const LatticeField& u, const ModulationState& s)
{
    const Eigen::VectorXcd rec = std::exp(cplx(0.0, s.theta)) * (s.point.phi.values.cast<cplx>() + s.r.values);
    return (rec - u.values).norm() / u.values.norm();
}

}  // namespace

TEST_CASE("decompose an exact family member")
{
    const auto& b = fixture::branch();
    const double w1 = b.E0 + 0.6 * b.eta;
    const LatticeField u = rotate(to_complex(b.evaluate(w1).phi), 0.3);
    const ModulationState s = decompose(u, b, fixture::omega0(b), 0.0);
    CHECK(std::abs(s.omega - w1) <= 1e-10 * w1);
    CHECK(std::abs(s.theta - 0.3) <= 1e-10);
    CHECK(s.r.values.norm() <= 1e-10 * u.values.norm());
    CHECK(reconstruction(u, s) <= 1e-12);
}

TEST_CASE("phase and scale tangent perturbations")
{
    const auto& b = fixture::branch();
    const double w1 = fixture::omega0(b);
    const GroundStatePoint p = b.evaluate(w1);
    LatticeField u = to_complex(p.phi);
    u.values += cplx(0.0, 1e-3) * p.phi.values.cast<cplx>();
    const ModulationState s = decompose(u, b, w1, 0.0);
    CHECK(s.theta == doctest::Approx(std::atan(1e-3)).epsilon(1e-6));
    CHECK(s.orthogonality <= 1e-10);

    // A small shift along d phi / d omega moves omega by about the same amount.
    const double dw = 1e-3 * b.eta;
    LatticeField v = to_complex(p.phi);
    v.values += dw * p.dphi.values.cast<cplx>();
    const ModulationState t = decompose(v, b, w1, 0.0);
    CHECK((t.omega - w1) == doctest::Approx(dw).epsilon(1e-2));
    CHECK(t.orthogonality <= 1e-10);
    CHECK(reconstruction(v, t) <= 1e-12);
}

TEST_CASE("gauge covariance")
{
    const auto& b = fixture::branch();
    const double w1 = fixture::omega0(b);
    const auto& lin = fixture::linearization();
    LatticeField u = to_complex(b.evaluate(w1).phi);
    u.values += 1e-3 * (lin.xi.head(u.size()) + lin.xi.tail(u.size()));
    const ModulationState s = decompose(u, b, w1, 0.0);
    const double a = 1.1;
    const ModulationState g = decompose(rotate(u, a), b, w1, a);
    CHECK(std::abs(g.omega - s.omega) <= 1e-10 * s.omega);
    CHECK(std::abs(std::remainder(g.theta - s.theta - a, 2 * std::numbers::pi)) <= 1e-10);
    CHECK((g.r.values - s.r.values).norm() <= 1e-10 * u.values.norm());
}

TEST_CASE("discrete and continuous split")
{
    const auto& lin = fixture::linearization();
    const Lattice& lat = lin.lattice();
    const int n = lat.size();
    // Real-structured spinor xi + sigma1 xi; <sigma1 xi, sigma3 xi> = 0 for real xi.
    const SpinorField X = SpinorField::from_stacked(lat, lin.xi + sigma1(lin.xi));
    const auto sx = split_discrete_continuous(X, lin);
    CHECK(std::abs(sx.z - 1.0) <= 1e-12);
    CHECK(sx.f.norm() <= 1e-9);

    // sigma3 Phi lies in the generalized kernel: no internal-mode component.
    const auto sk = split_discrete_continuous(SpinorField::from_stacked(lat, lin.sigma3_Phi()), lin);
    CHECK(std::abs(sk.z) <= 1e-10 * lin.sigma3_Phi().norm());

    const LatticeField r(lat, 1e-3 * fixture::random_vector(n, 21));
    const auto sr = split_discrete_continuous(r, lin);
    const SpinorField R = SpinorField::from_scalar(r);
    const cplx z = sigma3(lin.xi).dot(R.stacked());
    CHECK(std::abs(sr.z - z) <= 1e-12 * R.norm());
    const Eigen::VectorXcd rebuilt = sr.f.stacked() + z * lin.xi + std::conj(z) * sigma1(lin.xi);
    CHECK((rebuilt - R.stacked()).norm() <= 1e-9 * R.norm());
    CHECK(sr.reality_defect <= 1e-12);
}

TEST_CASE("nonlinear remainder and modulation rates")
{
    const auto& b = fixture::branch();
    const GroundStatePoint p = b.evaluate(fixture::omega0(b));
    const Lattice& lat = p.phi.lattice;
    CHECK(nonlinear_remainder(p.phi, LatticeField(lat)).values.norm() == 0.0);
    const ModulationRates z = modulation_rhs(LatticeField(lat), p);
    CHECK(z.omega_dot == 0.0);
    CHECK(z.gamma_dot == 0.0);

    // Remainder against direct evaluation minus the linear part.
    const LatticeField r(lat, 1e-2 * fixture::random_vector(lat.size(), 4));
    const Eigen::ArrayXcd phi = p.phi.values.cast<cplx>().array();
    const Eigen::ArrayXcd u = phi + r.values.array();
    const Eigen::ArrayXd p6 = p.phi.values.array().pow(6);
    const Eigen::ArrayXcd full = -u.abs().pow(6) * u + phi.abs().pow(6) * phi;
    const Eigen::ArrayXcd lin = -4.0 * p6 * r.values.array() - 3.0 * p6 * r.values.array().conjugate();
    CHECK((nonlinear_remainder(p.phi, r).values.array() - (full - lin)).matrix().norm() <=
          1e-12 * (full - lin).matrix().norm());

    const ModulationRates m = modulation_rhs(r, p);
    CHECK(m.reality_defect <= 1e-12 * (std::abs(m.omega_dot) + std::abs(m.gamma_dot) + 1e-300));
}

TEST_CASE("falsifier vanishes on the family")
{
    const auto& b = fixture::branch();
    const double w1 = b.E0 + 0.4 * b.eta;
    const LatticeField u = rotate(to_complex(b.evaluate(w1).phi), -0.8);
    const FalsifierPoint f = stability_falsifier(u, b, 2.0, fixture::omega0(b));
    CHECK(f.distance <= 1e-10);
    CHECK(f.mu == doctest::Approx(w1).epsilon(1e-8));
}

TEST_CASE("tracking a standing wave")
{
    const auto& b = fixture::branch();
    const double w = fixture::omega0(b);
    const Propagator p(b.q);
    const LatticeField u0 = to_complex(b.evaluate(w).phi);
    const TrackedRun run = track(b.q, p, u0, {0.01, 5.0, 0.5, false}, b, w, 0.0);
    REQUIRE(run.modulation.samples.size() == 11);
    for (const auto& s : run.modulation.samples) {
        CHECK(std::abs(s.z) <= 1e-9);
        CHECK(s.r_norm <= 1e-9);
        CHECK(std::abs(s.omega - w) <= 1e-9);
    }
    CHECK_THROWS_AS(persistence_metric(run.modulation), DomainError);
}

TEST_CASE("persistence metric on a synthetic series")
{
    ModulationTrajectory mt;
    for (int k = 0; k < 5; ++k) {
        ModulationSample s;
        s.t = k;
        s.z = std::polar(1.0 - 0.1 * (k % 2), 0.3 * k);
        mt.samples.push_back(s);
    }
    const PersistenceMetric m = persistence_metric(mt);
    CHECK(m.min_ratio == doctest::Approx(0.9));
    CHECK(m.drift == doctest::Approx(1.0 - 0.81));
}

TEST_CASE("centred derivative is exact on cubics")
{
    std::vector<double> t, y;
    for (int k = 0; k < 12; ++k) {
        t.push_back(0.1 * k);
        y.push_back(std::pow(0.1 * k, 3) - 2.0 * 0.1 * k);
    }
    const auto d = centered_derivative(t, y);
    for (int k = 2; k < 10; ++k) CHECK(d[k] == doctest::Approx(3.0 * t[k] * t[k] - 2.0).epsilon(1e-10));
}
