#include "doctest.h"

#include <cmath>

#include "dnls/linearization.hpp"
#include "dnls/tridiagonal.hpp"
#include "fixtures.hpp"

using namespace dnls;

TEST_CASE("block operator against an independent assembly")
{
    const auto& lin = fixture::linearization();
    const Lattice& lat = lin.lattice();
    const int n = lat.size();
    const RealField& phi = lin.point.phi;
    const Eigen::VectorXcd v = fixture::random_vector(2 * n, 11);
    // Linearizing -|u|^6 u around phi in (r, conj r):
    // top: (H + w) r - 4 phi^6 r - 3 phi^6 conj r, bottom is minus the mirror.
    const LatticeField top(lat, v.head(n)), bot(lat, v.tail(n));
    const Eigen::VectorXcd hr = apply_H(fixture::branch().q, top).values;
    const Eigen::VectorXcd hb = apply_H(fixture::branch().q, bot).values;
    const Eigen::ArrayXd p6 = phi.values.array().pow(6);
    Eigen::VectorXcd expect(2 * n);
    expect.head(n) = hr + lin.omega * v.head(n) + (-4.0 * p6 * v.head(n).array() - 3.0 * p6 * v.tail(n).array()).matrix();
    expect.tail(n) = -(hb + lin.omega * v.tail(n)) + (3.0 * p6 * v.head(n).array() + 4.0 * p6 * v.tail(n).array()).matrix();
    CHECK((lin.op.apply(v) - expect).norm() <= 1e-12 * expect.norm());
}

TEST_CASE("vanishing phi gives sigma3(H + omega)")
{
    const auto& b = fixture::branch(64);
    const double w = 0.05;
    BlockOperator op(b.q, w, RealField(b.q.lattice()));
    const auto ev = eigensystem(SymTridiagonal::schrodinger(b.q.field, w)).values;
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.dense());
    std::vector<double> got;
    for (auto e : es.eigenvalues()) {
        CHECK(std::abs(e.imag()) <= 1e-10);
        got.push_back(e.real());
    }
    std::vector<double> want;
    for (double e : ev) {
        want.push_back(e);
        want.push_back(-e);
    }
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    for (size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-10));
}

TEST_CASE("anticommutation with sigma1 and sigma3 pseudo-symmetry")
{
    const auto& lin = fixture::linearization();
    const int m = lin.op.size();
    for (unsigned seed : {1u, 2u, 3u}) {
        const Eigen::VectorXcd u = fixture::random_vector(m, seed), v = fixture::random_vector(m, seed + 10);
        CHECK((sigma1(lin.op.apply(u)) + lin.op.apply(sigma1(u))).norm() <= 1e-12 * lin.op.apply(u).norm());
        // <sigma3 H u, v> = <u, H^* sigma3 v> with H^* the matrix adjoint.
        const Eigen::MatrixXd D = lin.op.dense();
        const cplx lhs = v.dot(sigma3(lin.op.apply(u)));
        const cplx rhs = (D.transpose() * sigma3(v)).dot(u);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * u.norm() * v.norm() * D.norm());
    }
}

TEST_CASE("generalized kernel and Jordan block")
{
    const auto& lin = fixture::linearization();
    const KernelReport k = generalized_kernel(lin);
    CHECK(k.kernel_residual <= 1e-9);
    CHECK(k.jordan_e <= 1e-9);
    CHECK(std::abs(std::abs(k.jordan_c) - 1.0) <= 1e-6);
    CHECK(k.nilpotent_residual <= 1e-8);
}

TEST_CASE("internal mode")
{
    const auto& lin = fixture::linearization();
    const auto& b = fixture::branch();
    CHECK(lin.eigen_residual <= 1e-9);
    CHECK(lin.mirror_residual <= 1e-9);
    CHECK(std::abs(lin.lambda - b.E1 - lin.omega) <= 10.0 * (lin.omega - b.E0));
    // Independent residuals.
    CHECK((lin.op.apply(lin.xi) - lin.lambda * lin.xi).norm() <= 1e-9 * lin.xi.norm());
    const Eigen::VectorXcd s1 = sigma1(lin.xi);
    CHECK((lin.op.apply(s1) + lin.lambda * s1).norm() <= 1e-9 * s1.norm());
    CHECK(std::abs(lin.xi.dot(sigma3(lin.xi)) - 1.0) <= 1e-12);
    CHECK(std::abs(s1.dot(sigma3(s1)) + 1.0) <= 1e-12);

    LinearizationData it = lin;
    internal_mode_iterative(it, b.phi1);
    CHECK(it.lambda == doctest::Approx(lin.lambda).epsilon(1e-12));
}

TEST_CASE("nonresonance margin")
{
    const auto& lin = fixture::linearization();
    CHECK(nonresonance_certificate(lin).pass);
    CHECK(nonresonance_certificate(lin).margin > 0.0);
    CHECK_FALSE(nonresonance_margin((4.0 + 2.0 * lin.omega) / 2.0, lin.omega).pass);
}

TEST_CASE("spectral projections")
{
    const auto& lin = fixture::linearization(64);
    const auto P = spectral_projections(lin);
    const int m = lin.op.size();
    const Eigen::VectorXcd u = fixture::random_vector(m, 5);
    const Eigen::VectorXcd sum = P.P_ng * u + P.P_disc * u + P.P_c * u;
    CHECK((sum - u).norm() <= 1e-9 * u.norm());
    CHECK((P.P_c * lin.xi).norm() <= 1e-9 * lin.xi.norm());
    const Eigen::MatrixXd D = lin.op.dense();
    for (const Eigen::MatrixXd* p : {&P.P_ng, &P.P_disc, &P.P_c})
        CHECK(((D * (*p) - (*p) * D) * u).norm() <= 1e-8 * D.norm() * u.norm());
    // Spectrum symmetric under negation and conjugation.
    for (cplx e : lin.eigenvalues) {
        double dn = 1e300, dc = 1e300;
        for (cplx f : lin.eigenvalues) {
            dn = std::min(dn, std::abs(f + e));
            dc = std::min(dc, std::abs(f - std::conj(e)));
        }
        CHECK(dn <= 1e-9);
        CHECK(dc <= 1e-9);
    }
}

TEST_CASE("continuous-cluster solves on Ran P_c")
{
    const auto& lin = fixture::linearization(64);
    const int m = lin.op.size();
    const Eigen::VectorXcd b = lin.project_c(fixture::random_vector(m, 8));
    double res = 1.0;
    const Eigen::VectorXcd x = solve_on_continuous(lin, 2.0 * lin.lambda, b, false, &res);
    CHECK(res <= 1e-10);
    CHECK((lin.op.apply(x) - 2.0 * lin.lambda * x - b).norm() <= 1e-9 * b.norm());
}
