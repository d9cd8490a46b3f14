#include "doctest.h"

#include <cmath>

#include "dnls/normal_form.hpp"
#include "fixtures.hpp"

using namespace dnls;

namespace {

// The small-divisor margin needs a fine cluster, hence the wider window.
const NormalFormContext& context()
{
    static const NormalFormContext ctx = [] {
        const auto& b = fixture::branch(512);
        return make_normal_form_context(b, fixture::omega0(b));
    }();
    return ctx;
}

const NormalFormSystem& base()
{
    static const NormalFormSystem sys = extract_system(base_system(context()), 3, 1);
    return sys;
}

const StepResult& first_step()
{
    static const StepResult st = normal_form_step(base(), context(), 1);
    return st;
}

}  // namespace

TEST_CASE("extraction of single monomials")
{
    const Eigen::VectorXcd v = fixture::random_vector(10, 3);
    const PolyField f = extract_coefficients([&](cplx z) -> Eigen::VectorXcd { return z * z * v; }, 3);
    CHECK((f.coeff.at({2, 0}) - v).norm() <= 1e-12 * v.norm());
    for (const auto& [mn, c] : f.coeff)
        if (mn != Monomial{2, 0}) CHECK(c.norm() <= 1e-12 * v.norm());

    const PolyScalar s = extract_scalar_coefficients([](cplx z) { return std::norm(z) * z; }, 3);
    CHECK(std::abs(s.at(2, 1) - 1.0) <= 1e-12);
    CHECK(std::abs(s.at(1, 2)) <= 1e-12);
    CHECK(std::abs(s.at(1, 0)) <= 1e-12);
    CHECK(std::abs(s(cplx(0.01, 0.02)) - std::norm(cplx(0.01, 0.02)) * cplx(0.01, 0.02)) <= 1e-18);
}

TEST_CASE("quadratic coefficients of the nonlinearity against a hand expansion")
{
    const auto& lin = fixture::linearization();
    const int n = lin.lattice().size();
    const Eigen::ArrayXd xi1 = lin.xi.head(n).real().array(), xi2 = lin.xi.tail(n).real().array();
    const RealField& phi = lin.point.phi;
    auto eval = [&](cplx z) -> Eigen::VectorXcd {
        const LatticeField r(phi.lattice, (z * xi1.cast<cplx>() + std::conj(z) * xi2.cast<cplx>()).matrix());
        return nonlinear_remainder(phi, r).values;
    };
    ExtractOptions o;
    o.fit_degree = 7;
    const PolyField N = extract_coefficients(eval, 2, o);
    // -|u|^6 u = -u^4 conj(u)^3; the second-order part at real phi is
    // -phi^5 (6 r^2 + 12 r conj(r) + 3 conj(r)^2) with r = z xi1 + conj(z) xi2.
    const Eigen::ArrayXd p5 = phi.values.array().pow(5);
    const Eigen::ArrayXd c20 = -p5 * (6 * xi1 * xi1 + 12 * xi1 * xi2 + 3 * xi2 * xi2);
    const Eigen::ArrayXd c11 = -p5 * (12 * xi1 * xi2 + 12 * (xi1 * xi1 + xi2 * xi2) + 6 * xi1 * xi2);
    const Eigen::ArrayXd c02 = -p5 * (6 * xi2 * xi2 + 12 * xi1 * xi2 + 3 * xi1 * xi1);
    const double scale = c11.matrix().norm();
    CHECK((N.coeff.at({2, 0}) - c20.matrix().cast<cplx>()).norm() <= 1e-10 * scale);
    CHECK((N.coeff.at({1, 1}) - c11.matrix().cast<cplx>()).norm() <= 1e-10 * scale);
    CHECK((N.coeff.at({0, 2}) - c02.matrix().cast<cplx>()).norm() <= 1e-10 * scale);
    CHECK(N.max_norm(1) <= 1e-10 * scale);
}

TEST_CASE("scalar homological solves")
{
    CHECK(homological_solve_z(1.0, 5.0, 2, 0) == cplx(0.2));
    CHECK(homological_solve_z(cplx(0.0, 3.0), 2.0, 0, 2) == cplx(0.0, 3.0 / -6.0));
    CHECK_THROWS_AS(homological_solve_z(1.0, 5.0, 2, 1), SmallDivisor);
    const Eigen::VectorXcd A = Eigen::VectorXcd::Zero(context().lin.op.size());
    CHECK_THROWS_AS(homological_solve_omega(1.0, A, context(), 1, 1), SmallDivisor);
}

TEST_CASE("field homological solves")
{
    const auto& ctx = context();
    const int m = ctx.lin.op.size();
    const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(m);
    CHECK(homological_solve_f(zero, ctx, 2).field.norm() == 0.0);

    const Eigen::VectorXcd A = fixture::random_vector(m, 31);
    for (int k : {2, -2, 3}) {
        const HomologicalSolution s = homological_solve_f(A, ctx, k);
        CHECK(s.residual <= 1e-10);
        // Direct re-application on the projected right-hand side.
        const Eigen::VectorXcd PA = ctx.lin.project_c(A);
        const Eigen::VectorXcd lhs = ctx.lin.op.apply(s.field) - double(k) * ctx.lambda() * s.field;
        CHECK((lhs - PA).norm() <= 1e-9 * PA.norm());
    }
    const OmegaSolution w = homological_solve_omega(cplx(0.3, 0.1), A, ctx, 2, 0);
    CHECK(w.scalar == cplx(0.3, 0.1) / (2.0 * ctx.lambda()));
    CHECK(w.field.residual <= 1e-10);
    CHECK(homological_solve_z_field(A, ctx, 2, 0).residual <= 1e-10);
}

TEST_CASE("adjoint identity of the block operator")
{
    const auto& op = context().lin.op;
    const double k = 2.0 * context().lambda();
    const Eigen::VectorXcd u = fixture::random_vector(op.size(), 41), v = fixture::random_vector(op.size(), 42);
    const cplx lhs = v.dot(op.apply(u) - k * u);
    const cplx rhs = (op.apply_adjoint(v) - k * v).dot(u);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * u.norm() * v.norm());
}

TEST_CASE("small-divisor refusal")
{
    const auto& ctx = context();
    REQUIRE(!ctx.cluster.empty());
    const double mid = 0.5 * (ctx.cluster.front() + ctx.cluster.back());
    CHECK_FALSE(small_divisor_check(ctx, mid).ok);
    CHECK_FALSE(small_divisor_check(ctx, ctx.cluster.front()).ok);
    CHECK(small_divisor_check(ctx, 2.0 * ctx.lambda()).ok);
}

TEST_CASE("first normal-form step")
{
    const StepResult& st = first_step();
    const NormalFormSystem& sys = base();
    CHECK(st.gen.max_residual <= 1e-10);
    CHECK(st.gen.reality_defect <= 1e-10);
    CHECK(sys.max_imag_a() <= 1e-10);
    CHECK(st.system.max_imag_a() <= 1e-10);

    double before = 0.0;
    for (int m = 0; m <= 2; ++m) before = std::max(before, sys.A.coeff.at({m, 2 - m}).norm());
    REQUIRE(before > 0.0);
    for (int m = 0; m <= 2; ++m) {
        CHECK(st.system.A.coeff.at({m, 2 - m}).norm() <= 1e-10 * before);
        if (m - (2 - m) != 1) CHECK(std::abs(st.system.a.at(m, 2 - m)) <= 1e-10 * before);
        if (m != 2 - m) CHECK(std::abs(st.system.b.at(m, 2 - m)) <= 1e-10 * before);
    }
    // Resonant z monomials carry no generator.
    CHECK(st.gen.alpha.at(2, 1) == cplx(0.0));
    CHECK(st.gen.alpha.at(1, 0) == cplx(0.0));
    // Generator formulas against the extracted sources.
    CHECK(std::abs(st.gen.alpha.at(0, 2) - sys.a.at(0, 2) / (-3.0 * context().lambda())) <= 1e-12 * before);
    CHECK(std::abs(st.gen.alpha.at(2, 0) - sys.a.at(2, 0) / (1.0 * context().lambda())) <= 1e-12 * before);
}

TEST_CASE("inverse change of variables recovers the degree-2 field")
{
    const StepResult& st = first_step();
    const NormalFormSystem back = extract_system(inverse_system(st.system.eval, st.gen, context()), 3, 1);
    double before = 0.0, diff = 0.0;
    for (int m = 0; m <= 2; ++m) {
        before = std::max(before, base().A.coeff.at({m, 2 - m}).norm());
        diff = std::max(diff, (back.A.coeff.at({m, 2 - m}) - base().A.coeff.at({m, 2 - m})).norm());
        diff = std::max(diff, std::abs(back.a.at(m, 2 - m) - base().a.at(m, 2 - m)));
        diff = std::max(diff, std::abs(back.b.at(m, 2 - m) - base().b.at(m, 2 - m)));
    }
    CHECK(diff <= 1e-9 * before);
}

TEST_CASE("transform of the unperturbed trajectory")
{
    const auto& ctx = context();
    const FieldCorrections fc = leading_field_corrections(ctx);
    CHECK(fc.C10.residual <= 1e-10);
    CHECK(fc.Phi01.residual <= 1e-10);
    ModulationTrajectory mt;
    for (int k = 0; k < 4; ++k) {
        ModulationSample s;
        s.t = k;
        s.omega = ctx.lin.omega;
        s.f_pairings.assign(fc.functionals().size(), cplx(0.0));
        mt.samples.push_back(s);
    }
    const TransformedSeries ts = transform_trajectory(mt, first_step().gen, fc);
    for (size_t k = 0; k < ts.t.size(); ++k) {
        CHECK(ts.zeta[k] == cplx(0.0));
        CHECK(ts.varpi[k] == ctx.lin.omega);
    }
    mt.samples[0].f_pairings.clear();
    CHECK_THROWS_AS(transform_trajectory(mt, first_step().gen, fc), DomainError);
}

TEST_CASE("total variation")
{
    CHECK(total_variation({1.0, 3.0, 2.0, 2.0, -1.0}) == doctest::Approx(6.0));
    CHECK(total_variation({}) == 0.0);
}

TEST_CASE("homological solve constant is stable under window doubling")
{
    // Localized right-hand side, identical on both windows; ratio of l^{2,2} norms.
    auto ratio = [](int half) {
        const auto& b = fixture::branch(half);
        const NormalFormContext ctx = make_normal_form_context(b, fixture::omega0(b));
        const Lattice& lat = ctx.lin.lattice();
        const int n = lat.size();
        Eigen::VectorXcd A(2 * n);
        for (int i = 0; i < n; ++i) {
            const double g = std::exp(-std::abs(lat.site(i)) / 5.0);
            A[i] = cplx(g, 0.3 * g);
            A[n + i] = cplx(0.5 * g, -0.1 * g);
        }
        const HomologicalSolution s = homological_solve_f(A, ctx, 2);
        const SpinorField X = SpinorField::from_stacked(lat, s.field), Y = SpinorField::from_stacked(lat, A);
        return weighted_norm(X, 2.0) / weighted_norm(Y, 2.0);
    };
    // At +-256 the slowly decaying d phi / d omega tails are cut (about 6 % off).
    const double c1 = ratio(512), c2 = ratio(1024);
    CHECK(c1 > 0.0);
    CHECK(std::abs(c1 - c2) <= 0.01 * c2);
}
