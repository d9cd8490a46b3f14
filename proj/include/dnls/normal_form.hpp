#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "dnls/modulation.hpp"

namespace dnls {

// (m, n) indexes the monomial z^m conj(z)^n.
using Monomial = std::pair<int, int>;

// Spinor-valued polynomial in (z, conj z).
struct PolyField {
    int L = 0;
    std::map<Monomial, Eigen::VectorXcd> coeff;

    Eigen::VectorXcd operator()(cplx z) const;
    double max_norm(int degree) const;
};

struct PolyScalar {
    int L = 0;
    std::map<Monomial, cplx> coeff;

    cplx operator()(cplx z) const;
    cplx dz(cplx z) const;
    cplx dzbar(cplx z) const;
    cplx at(int m, int n) const;
};

struct ExtractOptions {
    int fit_degree = -1;        // default L + 4
    std::vector<double> radii;  // default: 7 radii geometric in [0.004, 0.04]
    double tolerance = 1e-9;    // relative interpolation residual
};

struct ExtractionReport {
    double residual = 0.0;  // relative misfit at an off-grid test point
    int fit_degree = 0;
    int samples = 0;
};

// Samples z = rho_j e^{2 pi i k / K}, separates m - n by a DFT in the angle
// and m + n by least squares in rho; returns the coefficients with
// 1 <= m + n <= L. Throws NumericalFailure when the residual exceeds the
// tolerance.
PolyField extract_coefficients(const std::function<Eigen::VectorXcd(cplx)>& evaluator, int L,
                               const ExtractOptions& opts = {}, ExtractionReport* report = nullptr);
PolyScalar extract_scalar_coefficients(const std::function<cplx(cplx)>& evaluator, int L,
                                       const ExtractOptions& opts = {}, ExtractionReport* report = nullptr);

// Everything the transformations need at the frozen frequency omega0.
struct NormalFormContext {
    LinearizationData lin;
    InternalModeDerivative dmode;
    std::vector<double> cluster;  // positive half of the windowed continuous cluster, ascending
    bool exact_cluster = false;   // from the dense spectrum of the linearization

    double lambda() const { return lin.lambda; }
};

// Cluster from sigma3(H + omega0) unless the linearization carries its dense
// spectrum.
NormalFormContext make_normal_form_context(const GroundStateBranch& branch, double omega0, bool dense_cluster = false);

// Right-hand side of the (z, f, omega, gamma) system at one point:
// a = i zdot - lambda z, b = i omegadot, c = gammadot,
// A = P_c(i fdot - H f - gammadot P_c sigma3 f).
struct SystemSample {
    cplx a{0.0, 0.0};
    cplx b{0.0, 0.0};
    cplx c{0.0, 0.0};
    Eigen::VectorXcd A;
};
using SystemEvaluator = std::function<SystemSample(cplx z, const Eigen::VectorXcd& f)>;

SystemEvaluator base_system(const NormalFormContext& ctx);

struct NormalFormSystem {
    SystemEvaluator eval;
    int L = 3;
    int ell = 0;  // steps applied
    PolyField A;
    PolyScalar a, b, c;
    double extraction_residual = 0.0;

    // Largest |imag| among the a coefficients (real by structure).
    double max_imag_a() const;
};

NormalFormSystem extract_system(SystemEvaluator eval, int L, int ell, const ExtractOptions& opts = {});

struct DivisorReport {
    double mu = 0.0;
    double distance = 0.0;  // to the cluster hull (negative inside)
    double margin = 0.0;    // 10 x local cluster spacing
    bool ok = false;
};
DivisorReport small_divisor_check(const NormalFormContext& ctx, double mu);

struct HomologicalSolution {
    Eigen::VectorXcd field;
    double residual = 0.0;  // ||(op - mu) x - P b|| / ||P b||
    double mu = 0.0;
};

// (H - k lambda) Phi = A on Ran P_c. Throws SmallDivisor.
HomologicalSolution homological_solve_f(const Eigen::VectorXcd& A, const NormalFormContext& ctx, int k);

// a / ((m - n - 1) lambda). Throws SmallDivisor when m - n = 1.
cplx homological_solve_z(cplx a, double lambda, int m, int n);

// Field part of the z transformation for terms z^m conj(z)^n <g, B>:
// C = R_{H^*}((1 - m + n) lambda) P_c^* B.
HomologicalSolution homological_solve_z_field(const Eigen::VectorXcd& B, const NormalFormContext& ctx, int m, int n);

struct OmegaSolution {
    cplx scalar{0.0, 0.0};
    HomologicalSolution field;
};
// a / ((m - n) lambda) and R_{H^*}((n - m) lambda) P_c^* A. Throws
// SmallDivisor when m = n.
OmegaSolution homological_solve_omega(cplx a, const Eigen::VectorXcd& A, const NormalFormContext& ctx, int m, int n);

struct Generators {
    int degree = 0;
    PolyField G;       // f = g + G(z)
    PolyScalar alpha;  // z = zeta + alpha(zeta)
    PolyScalar beta;   // omega = varpi + beta(zeta)
    double max_residual = 0.0;
    std::vector<double> residuals;
    // sigma1 G_mn - G_nm, worst relative
    double reality_defect = 0.0;
};

struct StepResult {
    NormalFormSystem system;
    Generators gen;
};

// Degree ell + 1 transformations of the f, z and omega equations in that
// order. Each change of variables is composed with the evaluator exactly and
// the new system is re-extracted up to degree L.
StepResult normal_form_step(const NormalFormSystem& sys, const NormalFormContext& ctx, int ell,
                            const ExtractOptions& opts = {});

// Vector field in the old variables rebuilt from the transformed evaluator
// and the generators (inverse change of variables).
SystemEvaluator inverse_system(const SystemEvaluator& transformed, const Generators& gen,
                               const NormalFormContext& ctx);

// Leading terms linear in the radiation, z^m conj(z)^n <g, B> with
// (m, n) in {(1, 0), (0, 1)}, from the quadratic part of the nonlinearity.
struct FieldCorrections {
    Eigen::VectorXcd Bz10, Bz01;  // z equation
    Eigen::VectorXcd Bw10, Bw01;  // omega equation
    HomologicalSolution C10, C01;      // z = zeta + ... + sum zeta^m conj(zeta)^n <g, C_mn>
    HomologicalSolution Phi10, Phi01;  // omega = varpi + ... + sum zeta^m conj(zeta)^n <g, Phi_mn>

    // Functionals to pair f with during tracking: C10, C01, Phi10, Phi01.
    std::vector<Eigen::VectorXcd> functionals() const;
};
FieldCorrections leading_field_corrections(const NormalFormContext& ctx);

struct TransformedSeries {
    std::vector<double> t;
    std::vector<cplx> zeta;
    std::vector<double> varpi;
    double max_imag_varpi = 0.0;
};

// zeta from z = zeta + alpha(zeta) + A(zeta, g) by fixed-point iteration and
// varpi = omega - beta(zeta) - C(zeta, g), with g = f - G(z). Needs samples
// tracked with fc.functionals(). Throws DomainError when |z| exceeds the
// validity radius.
TransformedSeries transform_trajectory(const ModulationTrajectory& mt, const Generators& gen,
                                       const FieldCorrections& fc, double validity_radius = 0.1);

double total_variation(const std::vector<double>& y);

}  // namespace dnls
