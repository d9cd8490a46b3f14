#include "dnls/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "dnls/tridiagonal.hpp"

namespace dnls {

namespace {

cplx monomial(cplx z, int m, int n)
{
    cplx v = 1.0;
    for (int i = 0; i < m; ++i) v *= z;
    const cplx zb = std::conj(z);
    for (int i = 0; i < n; ++i) v *= zb;
    return v;
}

std::vector<Monomial> monomials_of_degree(int d)
{
    std::vector<Monomial> out;
    for (int m = d; m >= 0; --m) out.push_back({m, d - m});
    return out;
}

}  // namespace

// ---------------------------------------------------------------- polynomials

Eigen::VectorXcd PolyField::operator()(cplx z) const
{
    Eigen::VectorXcd out;
    for (const auto& [mn, v] : coeff) {
        if (out.size() == 0) out = Eigen::VectorXcd::Zero(v.size());
        out += monomial(z, mn.first, mn.second) * v;
    }
    return out;
}

double PolyField::max_norm(int degree) const
{
    double m = 0.0;
    for (const auto& [mn, v] : coeff)
        if (mn.first + mn.second == degree) m = std::max(m, v.norm());
    return m;
}

cplx PolyScalar::operator()(cplx z) const
{
    cplx s = 0.0;
    for (const auto& [mn, v] : coeff) s += v * monomial(z, mn.first, mn.second);
    return s;
}

cplx PolyScalar::dz(cplx z) const
{
    cplx s = 0.0;
    for (const auto& [mn, v] : coeff)
        if (mn.first > 0) s += double(mn.first) * v * monomial(z, mn.first - 1, mn.second);
    return s;
}

cplx PolyScalar::dzbar(cplx z) const
{
    cplx s = 0.0;
    for (const auto& [mn, v] : coeff)
        if (mn.second > 0) s += double(mn.second) * v * monomial(z, mn.first, mn.second - 1);
    return s;
}

cplx PolyScalar::at(int m, int n) const
{
    auto it = coeff.find({m, n});
    return it == coeff.end() ? cplx(0.0) : it->second;
}

// ---------------------------------------------------------------- extraction

PolyField extract_coefficients(const std::function<Eigen::VectorXcd(cplx)>& evaluator, int L,
                               const ExtractOptions& opts, ExtractionReport* report)
{
    if (L < 1) throw DomainError("extraction needs L >= 1");
    const int D = std::max(L, opts.fit_degree > 0 ? opts.fit_degree : L + 4);
    std::vector<double> radii = opts.radii;
    if (radii.empty()) radii = log_spaced(0.004, 0.04, 7);
    const int J = int(radii.size());
    if (J < D / 2 + 1) throw DomainError("extraction needs at least fit_degree/2 + 1 radii");
    const int K = 2 * D + 3;
    const double rmax = *std::max_element(radii.begin(), radii.end());

    std::vector<std::vector<Eigen::VectorXcd>> y(J, std::vector<Eigen::VectorXcd>(K));
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) y[j][k] = evaluator(std::polar(radii[j], 2.0 * M_PI * k / K));
    const Eigen::Index dim = y[0][0].size();

    PolyField all;
    all.L = D;
    for (int d = -D; d <= D; ++d) {
        std::vector<int> degrees;
        for (int s = std::abs(d); s <= D; s += 2) degrees.push_back(s);
        Eigen::MatrixXcd F(J, dim);
        for (int j = 0; j < J; ++j) {
            Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(dim);
            for (int k = 0; k < K; ++k) acc += std::polar(1.0, -2.0 * M_PI * d * k / K) * y[j][k];
            F.row(j) = acc.transpose() / double(K);
        }
        Eigen::MatrixXd V(J, degrees.size());
        for (int j = 0; j < J; ++j)
            for (size_t i = 0; i < degrees.size(); ++i) V(j, i) = std::pow(radii[j] / rmax, degrees[i]);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(V);
        Eigen::MatrixXd cr = qr.solve(Eigen::MatrixXd(F.real())), ci = qr.solve(Eigen::MatrixXd(F.imag()));
        for (size_t i = 0; i < degrees.size(); ++i) {
            const int s = degrees[i];
            Eigen::VectorXcd c(dim);
            for (Eigen::Index q = 0; q < dim; ++q) c[q] = cplx(cr(i, q), ci(i, q)) / std::pow(rmax, s);
            all.coeff[{(s + d) / 2, (s - d) / 2}] = c;
        }
    }

    // Off-grid misfit.
    const cplx zt = std::polar(1.1 * std::sqrt(radii.front() * rmax), 0.123 + 0.7 * 2.0 * M_PI / K);
    const Eigen::VectorXcd et = evaluator(zt);
    const double ne = et.norm();
    const double residual = ne > 0.0 ? (et - all(zt)).norm() / ne : (all(zt)).norm();
    if (report) {
        report->residual = residual;
        report->fit_degree = D;
        report->samples = J * K + 1;
    }
    if (!(residual <= opts.tolerance))
        throw NumericalFailure("coefficient extraction residual " + std::to_string(residual) +
                               " exceeds tolerance: evaluator is not polynomial at this degree");

    PolyField out;
    out.L = L;
    for (const auto& [mn, v] : all.coeff)
        if (mn.first + mn.second >= 1 && mn.first + mn.second <= L) out.coeff[mn] = v;
    return out;
}

PolyScalar extract_scalar_coefficients(const std::function<cplx(cplx)>& evaluator, int L, const ExtractOptions& opts,
                                       ExtractionReport* report)
{
    PolyField f = extract_coefficients(
        [&](cplx z) {
            Eigen::VectorXcd v(1);
            v[0] = evaluator(z);
            return v;
        },
        L, opts, report);
    PolyScalar s;
    s.L = L;
    for (const auto& [mn, v] : f.coeff) s.coeff[mn] = v[0];
    return s;
}

// ---------------------------------------------------------------- context

NormalFormContext make_normal_form_context(const GroundStateBranch& branch, double omega0, bool dense_cluster)
{
    NormalFormContext ctx;
    ctx.lin = build_linearization(branch, branch.evaluate(omega0));
    if (dense_cluster) {
        internal_mode(ctx.lin, branch.phi1);
        for (double e : continuous_cluster(ctx.lin))
            if (e > 0.0) ctx.cluster.push_back(e);
        ctx.exact_cluster = true;
    } else {
        internal_mode_iterative(ctx.lin, branch.phi1);
        auto es = eigensystem(SymTridiagonal::schrodinger(branch.q.field));
        for (Eigen::Index k = 0; k < es.values.size(); ++k)
            if (es.values[k] >= 0.0 && es.values[k] <= 4.0) ctx.cluster.push_back(es.values[k] + omega0);
    }
    std::sort(ctx.cluster.begin(), ctx.cluster.end());
    if (ctx.cluster.size() < 2) throw NumericalFailure("continuous cluster is too small");
    ctx.dmode = internal_mode_derivative(ctx.lin);
    return ctx;
}

// ---------------------------------------------------------------- base system

SystemEvaluator base_system(const NormalFormContext& ctx0)
{
    auto ctx = std::make_shared<const NormalFormContext>(ctx0);
    struct Pre {
        Eigen::VectorXcd xi, s1xi, s3xi, dxi, s1dxi, s3dxi, s3Phi, dPhi;
    };
    auto pre = std::make_shared<Pre>();
    const auto& lin = ctx->lin;
    pre->xi = lin.xi;
    pre->s1xi = sigma1(lin.xi);
    pre->s3xi = sigma3(lin.xi);
    pre->dxi = ctx->dmode.dxi;
    pre->s1dxi = sigma1(ctx->dmode.dxi);
    pre->s3dxi = sigma3(ctx->dmode.dxi);
    pre->s3Phi = lin.sigma3_Phi();
    pre->dPhi = lin.dPhi();
    return [ctx, pre](cplx z, const Eigen::VectorXcd& f) {
        const auto& lin = ctx->lin;
        const int n = lin.lattice().size();
        const cplx zb = std::conj(z);
        Eigen::VectorXcd R = z * pre->xi + zb * pre->s1xi;
        if (f.size() == R.size()) R += f;
        LatticeField r(lin.lattice(), R.head(n));
        ModulationRates rates = modulation_rhs(r, lin.point);
        const double wd = rates.omega_dot, gd = rates.gamma_dot;
        const cplx iwd(0.0, wd);
        LatticeField nl = nonlinear_remainder(lin.point.phi, r);
        Eigen::VectorXcd S(2 * n);
        S << nl.values, -nl.values.conjugate();
        S += gd * sigma3(R) + gd * pre->s3Phi - iwd * pre->dPhi;

        SystemSample out;
        out.a = pre->s3xi.dot(S) + iwd * pre->s3dxi.dot(R);
        if (f.size() == R.size()) out.a += lin.lambda * pre->s3xi.dot(f);
        out.b = iwd;
        out.c = gd;
        Eigen::VectorXcd src = S - iwd * (z * pre->dxi + zb * pre->s1dxi);
        if (f.size() == R.size()) src -= gd * lin.project_c(sigma3(f));
        out.A = lin.project_c(src);
        return out;
    };
}

double NormalFormSystem::max_imag_a() const
{
    double m = 0.0;
    for (const auto& [mn, v] : a.coeff) m = std::max(m, std::abs(v.imag()));
    return m;
}

NormalFormSystem extract_system(SystemEvaluator eval, int L, int ell, const ExtractOptions& opts)
{
    NormalFormSystem sys;
    sys.eval = std::move(eval);
    sys.L = L;
    sys.ell = ell;
    const Eigen::VectorXcd none;
    ExtractionReport rep;
    PolyField all = extract_coefficients(
        [&](cplx z) {
            SystemSample s = sys.eval(z, none);
            Eigen::VectorXcd v(3 + s.A.size());
            v << s.a, s.b, s.c, s.A;
            return v;
        },
        L, opts, &rep);
    sys.extraction_residual = rep.residual;
    sys.A.L = sys.a.L = sys.b.L = sys.c.L = L;
    for (const auto& [mn, v] : all.coeff) {
        sys.a.coeff[mn] = v[0];
        sys.b.coeff[mn] = v[1];
        sys.c.coeff[mn] = v[2];
        sys.A.coeff[mn] = v.tail(v.size() - 3);
    }
    return sys;
}

// ---------------------------------------------------------------- homological solves

DivisorReport small_divisor_check(const NormalFormContext& ctx, double mu)
{
    const auto& P = ctx.cluster;
    const size_t n = P.size();
    DivisorReport r;
    r.mu = mu;
    const double x = std::abs(mu);
    if (x < P.front()) {
        r.distance = P.front() - x;
        r.margin = 10.0 * (P[1] - P[0]);
    } else if (x > P.back()) {
        r.distance = x - P.back();
        r.margin = 10.0 * (P[n - 1] - P[n - 2]);
    } else {
        auto it = std::lower_bound(P.begin(), P.end(), x);
        size_t i = std::min<size_t>(std::max<size_t>(size_t(it - P.begin()), 1), n - 1);
        r.distance = -std::min(x - P.front(), P.back() - x);
        r.margin = 10.0 * (P[i] - P[i - 1]);
    }
    r.ok = r.distance > r.margin;
    return r;
}

static HomologicalSolution solve_checked(const Eigen::VectorXcd& b, const NormalFormContext& ctx, double mu,
                                         bool adjoint)
{
    auto dr = small_divisor_check(ctx, mu);
    if (!dr.ok)
        throw SmallDivisor("shift " + std::to_string(mu) + " is within " + std::to_string(dr.margin) +
                           " (10x the local cluster spacing) of the windowed continuous cluster");
    HomologicalSolution s;
    s.mu = mu;
    if (b.size() == 0 || b.norm() == 0.0) {
        s.field = Eigen::VectorXcd::Zero(ctx.lin.op.size());
        return s;
    }
    s.field = solve_on_continuous(ctx.lin, mu, b, adjoint, &s.residual);
    return s;
}

HomologicalSolution homological_solve_f(const Eigen::VectorXcd& A, const NormalFormContext& ctx, int k)
{
    return solve_checked(A, ctx, k * ctx.lambda(), false);
}

cplx homological_solve_z(cplx a, double lambda, int m, int n)
{
    if (m - n == 1) throw SmallDivisor("resonant monomial m - n = 1 stays in the normal form");
    return a / (double(m - n - 1) * lambda);
}

HomologicalSolution homological_solve_z_field(const Eigen::VectorXcd& B, const NormalFormContext& ctx, int m, int n)
{
    return solve_checked(B, ctx, double(1 - m + n) * ctx.lambda(), true);
}

OmegaSolution homological_solve_omega(cplx a, const Eigen::VectorXcd& A, const NormalFormContext& ctx, int m, int n)
{
    if (m == n) throw SmallDivisor("resonant monomial m = n stays in the omega equation; the field shift 0 meets the generalized kernel");
    OmegaSolution s;
    s.scalar = a / (double(m - n) * ctx.lambda());
    s.field = solve_checked(A, ctx, double(n - m) * ctx.lambda(), true);
    return s;
}

// ---------------------------------------------------------------- steps

namespace {

struct FieldGenerator {
    std::vector<Monomial> mons;
    std::vector<Eigen::VectorXcd> G, HG;

    // P_c(i Gdot - H G - gammadot P_c sigma3 G) given a = i zdot - lambda z.
    Eigen::VectorXcd correction(const LinearizationData& lin, cplx z, cplx a, cplx gd) const
    {
        const double lam = lin.lambda;
        Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(lin.op.size());
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(lin.op.size());
        for (size_t i = 0; i < mons.size(); ++i) {
            const auto [m, n] = mons[i];
            const cplx mono = monomial(z, m, n);
            corr += mono * (double(m - n) * lam * G[i] - HG[i]);
            cplx dm = 0.0;
            if (m > 0) dm += double(m) * monomial(z, m - 1, n) * a;
            if (n > 0) dm -= double(n) * monomial(z, m, n - 1) * std::conj(a);
            corr += dm * G[i];
            g += mono * G[i];
        }
        corr -= gd * lin.project_c(sigma3(g));
        return lin.project_c(corr);
    }

    Eigen::VectorXcd value(cplx z, Eigen::Index dim) const
    {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(dim);
        for (size_t i = 0; i < mons.size(); ++i) g += monomial(z, mons[i].first, mons[i].second) * G[i];
        return g;
    }
};

std::shared_ptr<FieldGenerator> make_field_generator(const PolyField& G, const LinearizationData& lin)
{
    auto fg = std::make_shared<FieldGenerator>();
    for (const auto& [mn, v] : G.coeff) {
        fg->mons.push_back(mn);
        fg->G.push_back(v);
        fg->HG.push_back(lin.op.apply(v));
    }
    return fg;
}

cplx invert_zeta(const PolyScalar& alpha, cplx z)
{
    cplx zeta = z;
    for (int it = 0; it < 100; ++it) {
        cplx next = z - alpha(zeta);
        if (std::abs(next - zeta) <= 1e-16 * std::abs(z)) return next;
        zeta = next;
    }
    return zeta;
}

}  // namespace

StepResult normal_form_step(const NormalFormSystem& sys, const NormalFormContext& ctx0, int ell,
                            const ExtractOptions& opts)
{
    if (ell < 1 || ell >= sys.L) throw DomainError("normal form step needs 1 <= ell < L");
    auto ctx = std::make_shared<const NormalFormContext>(ctx0);
    const int d = ell + 1;
    const double lam = ctx->lambda();
    const Eigen::Index dim = ctx->lin.op.size();
    StepResult res;
    Generators& gen = res.gen;
    gen.degree = d;
    gen.G.L = gen.alpha.L = gen.beta.L = d;

    // f component
    for (const auto& mn : monomials_of_degree(d)) {
        auto it = sys.A.coeff.find(mn);
        Eigen::VectorXcd A = it == sys.A.coeff.end() ? Eigen::VectorXcd::Zero(dim) : it->second;
        auto sol = homological_solve_f(A, *ctx, mn.first - mn.second);
        gen.G.coeff[mn] = -sol.field;
        gen.residuals.push_back(sol.residual);
        gen.max_residual = std::max(gen.max_residual, sol.residual);
    }
    for (const auto& [mn, v] : gen.G.coeff) {
        const auto& w = gen.G.coeff.at({mn.second, mn.first});
        const double nv = std::max(v.norm(), 1e-300);
        gen.reality_defect = std::max(gen.reality_defect, (sigma1(v) - w).norm() / nv);
    }
    auto fg = make_field_generator(gen.G, ctx->lin);
    SystemEvaluator E0 = sys.eval;
    SystemEvaluator E1 = [E0, fg, ctx, dim](cplx z, const Eigen::VectorXcd& g) {
        Eigen::VectorXcd f = fg->value(z, dim);
        if (g.size() == dim) f += g;
        SystemSample s = E0(z, f);
        s.A -= fg->correction(ctx->lin, z, s.a, s.c);
        return s;
    };

    // z component
    const Eigen::VectorXcd none;
    PolyScalar a1 = extract_scalar_coefficients([&](cplx z) { return E1(z, none).a; }, sys.L, opts);
    for (const auto& mn : monomials_of_degree(d)) {
        if (mn.first - mn.second == 1) continue;
        gen.alpha.coeff[mn] = homological_solve_z(a1.at(mn.first, mn.second), lam, mn.first, mn.second);
    }
    const PolyScalar alpha = gen.alpha;
    SystemEvaluator E2 = [E1, alpha, lam](cplx zeta, const Eigen::VectorXcd& g) {
        const cplx z = zeta + alpha(zeta);
        SystemSample s = E1(z, g);
        const cplx v = lam * z + s.a;
        const cplx p = alpha.dz(zeta), q = alpha.dzbar(zeta);
        const cplx w = (v * (1.0 + std::conj(p)) + q * std::conj(v)) / (std::norm(1.0 + p) - std::norm(q));
        s.a = w - lam * zeta;
        return s;
    };

    // omega component
    PolyScalar b2 = extract_scalar_coefficients([&](cplx z) { return E2(z, none).b; }, sys.L, opts);
    for (const auto& mn : monomials_of_degree(d)) {
        if (mn.first == mn.second) continue;
        gen.beta.coeff[mn] = homological_solve_omega(b2.at(mn.first, mn.second), Eigen::VectorXcd(), *ctx, mn.first,
                                                     mn.second)
                                 .scalar;
    }
    const PolyScalar beta = gen.beta;
    SystemEvaluator E3 = [E2, beta, lam](cplx zeta, const Eigen::VectorXcd& g) {
        SystemSample s = E2(zeta, g);
        const cplx w = lam * zeta + s.a;
        s.b -= beta.dz(zeta) * w - beta.dzbar(zeta) * std::conj(w);
        return s;
    };

    res.system = extract_system(E3, sys.L, ell, opts);
    return res;
}

SystemEvaluator inverse_system(const SystemEvaluator& transformed, const Generators& gen,
                               const NormalFormContext& ctx0)
{
    auto ctx = std::make_shared<const NormalFormContext>(ctx0);
    auto fg = make_field_generator(gen.G, ctx->lin);
    const PolyScalar alpha = gen.alpha, beta = gen.beta;
    const double lam = ctx->lambda();
    const Eigen::Index dim = ctx->lin.op.size();
    return [transformed, fg, ctx, alpha, beta, lam, dim](cplx z, const Eigen::VectorXcd& f) {
        Eigen::VectorXcd g = -fg->value(z, dim);
        if (f.size() == dim) g += f;
        const cplx zeta = invert_zeta(alpha, z);
        SystemSample s = transformed(zeta, g);
        const cplx w = lam * zeta + s.a;
        s.b += beta.dz(zeta) * w - beta.dzbar(zeta) * std::conj(w);
        const cplx p = alpha.dz(zeta), q = alpha.dzbar(zeta);
        const cplx izdot = w * (1.0 + p) - q * std::conj(w);
        s.a = izdot - lam * z;
        s.A += fg->correction(ctx->lin, z, s.a, s.c);
        return s;
    };
}

// ---------------------------------------------------------------- radiation-linear terms

FieldCorrections leading_field_corrections(const NormalFormContext& ctx)
{
    const auto& lin = ctx.lin;
    const int n = lin.lattice().size();
    const Eigen::VectorXd xi1 = lin.xi.head(n).real(), xi2 = lin.xi.tail(n).real();
    const Eigen::VectorXd phi = lin.point.phi.values;
    const Eigen::VectorXd phi5 = phi.array().pow(5);
    const double qp = lin.qprime;

    // Quadratic part -phi^5 (6 r^2 + 12 r rbar + 3 rbar^2) with r = r_d + g:
    // the cross terms are -phi^5 [(12 r_d + 12 rbar_d) g + (12 r_d + 6 rbar_d) gbar].
    auto build = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXcd& bz, Eigen::VectorXcd& bw) {
        Eigen::VectorXd Ng = -phi5.array() * (12.0 * u.array() + 12.0 * v.array());
        Eigen::VectorXd Ngb = -phi5.array() * (12.0 * u.array() + 6.0 * v.array());
        Eigen::VectorXd Cg = -phi5.array() * (12.0 * v.array() + 6.0 * u.array());   // conj N, g part
        Eigen::VectorXd Cgb = -phi5.array() * (12.0 * v.array() + 12.0 * u.array()); // conj N, gbar part
        bz.resize(2 * n);
        bw.resize(2 * n);
        bz << (xi1.array() * Ng.array() + xi2.array() * Cg.array()).matrix().cast<cplx>(),
            (xi1.array() * Ngb.array() + xi2.array() * Cgb.array()).matrix().cast<cplx>();
        bw << (phi.array() * (Ng - Cg).array() / qp).matrix().cast<cplx>(),
            (phi.array() * (Ngb - Cgb).array() / qp).matrix().cast<cplx>();
    };
    FieldCorrections fc;
    build(xi1, xi2, fc.Bz10, fc.Bw10);  // coefficient of z: r_d -> xi1, rbar_d -> xi2
    build(xi2, xi1, fc.Bz01, fc.Bw01);  // coefficient of conj z
    fc.C10 = homological_solve_z_field(fc.Bz10, ctx, 1, 0);
    fc.C01 = homological_solve_z_field(fc.Bz01, ctx, 0, 1);
    fc.Phi10 = homological_solve_omega(0.0, fc.Bw10, ctx, 1, 0).field;
    fc.Phi01 = homological_solve_omega(0.0, fc.Bw01, ctx, 0, 1).field;
    return fc;
}

std::vector<Eigen::VectorXcd> FieldCorrections::functionals() const
{
    return {C10.field, C01.field, Phi10.field, Phi01.field};
}

TransformedSeries transform_trajectory(const ModulationTrajectory& mt, const Generators& gen,
                                       const FieldCorrections& fc, double validity_radius)
{
    const auto fns = fc.functionals();
    // <G_mn, X> for every generator coefficient and functional.
    std::vector<std::pair<Monomial, std::vector<cplx>>> gx;
    for (const auto& [mn, v] : gen.G.coeff) {
        std::vector<cplx> row;
        for (const auto& x : fns) row.push_back(x.dot(v));
        gx.push_back({mn, row});
    }
    TransformedSeries out;
    for (const auto& s : mt.samples) {
        if (s.f_pairings.size() != fns.size())
            throw DomainError("samples were not tracked with the normal-form functionals");
        if (std::abs(s.z) > validity_radius)
            throw DomainError("|z| = " + std::to_string(std::abs(s.z)) + " exceeds the polynomial validity radius");
        std::vector<cplx> g = s.f_pairings;
        for (const auto& [mn, row] : gx) {
            const cplx mono = monomial(s.z, mn.first, mn.second);
            for (size_t k = 0; k < g.size(); ++k) g[k] -= mono * row[k];
        }
        cplx zeta = s.z;
        for (int it = 0; it < 100; ++it) {
            cplx next = s.z - gen.alpha(zeta) - (zeta * g[0] + std::conj(zeta) * g[1]);
            const bool done = std::abs(next - zeta) <= 1e-16 * std::abs(s.z);
            zeta = next;
            if (done) break;
        }
        const cplx varpi = s.omega - gen.beta(zeta) - (zeta * g[2] + std::conj(zeta) * g[3]);
        out.t.push_back(s.t);
        out.zeta.push_back(zeta);
        out.varpi.push_back(varpi.real());
        out.max_imag_varpi = std::max(out.max_imag_varpi, std::abs(varpi.imag()));
    }
    return out;
}

double total_variation(const std::vector<double>& y)
{
    double tv = 0.0;
    for (size_t i = 1; i < y.size(); ++i) tv += std::abs(y[i] - y[i - 1]);
    return tv;
}

}  // namespace dnls
