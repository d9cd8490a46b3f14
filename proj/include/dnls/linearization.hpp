#pragma once

#include <Eigen/Dense>

#include "json.hpp"

#include <memory>
#include <optional>
#include <vector>

#include "dnls/ground_state.hpp"

namespace dnls {

// Pair of lattice fields R = (R1, R2). Linear algebra uses the stacked
// vector [R1; R2] of length 2N.
struct SpinorField {
    Lattice lattice;
    Eigen::VectorXcd top;
    Eigen::VectorXcd bottom;

    SpinorField() = default;
    explicit SpinorField(const Lattice& lat);
    SpinorField(const Lattice& lat, Eigen::VectorXcd t, Eigen::VectorXcd b);
    static SpinorField from_stacked(const Lattice& lat, const Eigen::VectorXcd& v);
    // (r, conj r)
    static SpinorField from_scalar(const LatticeField& r);

    Eigen::VectorXcd stacked() const;
    SpinorField sigma1() const { return SpinorField(lattice, bottom, top); }
    SpinorField sigma3() const { return SpinorField(lattice, top, -bottom); }
    SpinorField conj() const { return SpinorField(lattice, top.conjugate(), bottom.conjugate()); }
    // ||sigma1 R - conj(R)||
    double real_structure_defect() const;
    double norm() const { return std::sqrt(top.squaredNorm() + bottom.squaredNorm()); }
};

cplx inner(const SpinorField& a, const SpinorField& b);
double weighted_norm(const SpinorField& a, double sigma);

Eigen::VectorXcd sigma1(const Eigen::VectorXcd& v);
Eigen::VectorXcd sigma3(const Eigen::VectorXcd& v);

// Partially pivoted LU of a matrix with two sub- and two super-diagonals in
// the site-interleaved ordering (R1(n0), R2(n0), R1(n0+1), ...).
class BandedLU {
public:
    BandedLU(int n, const std::vector<cplx>& band);  // band in LAPACK gb layout, kl = ku = 2
    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs_interleaved) const;

private:
    int n_;
    std::vector<cplx> ab_;
    std::vector<int> ipiv_;
};

// The linearized operator sigma3 (H + omega) + phi^6 [[-4, -3], [3, 4]].
class BlockOperator {
public:
    BlockOperator() = default;
    BlockOperator(const Potential& q, double omega, const RealField& phi);

    const Lattice& lattice() const { return lattice_; }
    int size() const { return 2 * lattice_.size(); }
    double omega() const { return omega_; }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& v) const;  // sigma3 H sigma3
    SpinorField apply(const SpinorField& s) const;
    Eigen::MatrixXd dense() const;

    // Factorization of (op - mu) for repeated shifted solves.
    std::shared_ptr<const BandedLU> factor(cplx mu) const;
    Eigen::VectorXcd solve_shifted(cplx mu, const Eigen::VectorXcd& rhs) const;

private:
    Lattice lattice_;
    double omega_ = 0.0;
    Eigen::VectorXd hdiag_;  // 2 + q + omega
    Eigen::VectorXd v6_;     // phi^6
};

Eigen::VectorXcd to_interleaved(const Eigen::VectorXcd& stacked);
Eigen::VectorXcd from_interleaved(const Eigen::VectorXcd& inter);

struct KernelReport {
    double kernel_residual = 0.0;    // ||H sigma3 Phi|| / ||Phi||
    double jordan_c = 0.0;           // H dPhi = c sigma3 Phi + e
    double jordan_e = 0.0;           // ||e|| / ||H dPhi||
    double nilpotent_residual = 0.0; // ||H^2 dPhi|| / ||dPhi||
};

struct LinearizationData {
    double omega = 0.0;
    double E0 = 0.0;
    double E1 = 0.0;
    GroundStatePoint point;
    BlockOperator op;
    double qprime = 0.0;  // 2 <phi, dphi>

    // Internal mode, filled by internal_mode / refine_internal_mode.
    double lambda = 0.0;
    Eigen::VectorXcd xi;            // stacked, real entries, <xi, sigma3 xi> = 1
    double xi_pairing_raw = 0.0;    // <xi, sigma3 xi> before normalization (for ||xi||_2 = 1)
    double eigen_residual = 0.0;    // ||(H - lambda) xi|| / ||xi||
    double mirror_residual = 0.0;   // ||H sigma1 xi + lambda sigma1 xi|| / ||xi||
    std::vector<cplx> eigenvalues;  // dense spectrum when computed

    const Lattice& lattice() const { return op.lattice(); }
    Eigen::VectorXcd Phi() const;        // (phi, phi)
    Eigen::VectorXcd sigma3_Phi() const; // (phi, -phi)
    Eigen::VectorXcd dPhi() const;       // (dphi, dphi)

    Eigen::VectorXcd project_ng(const Eigen::VectorXcd& x) const;
    Eigen::VectorXcd project_lambda(const Eigen::VectorXcd& x) const;
    Eigen::VectorXcd project_minus_lambda(const Eigen::VectorXcd& x) const;
    Eigen::VectorXcd project_c(const Eigen::VectorXcd& x) const;
    // Adjoint projection P_c^* = sigma3 P_c sigma3.
    Eigen::VectorXcd project_c_adjoint(const Eigen::VectorXcd& x) const;
};

LinearizationData build_linearization(const GroundStateBranch& branch, double omega);
LinearizationData build_linearization(const GroundStateBranch& branch, const GroundStatePoint& point);

KernelReport generalized_kernel(const LinearizationData& data);

// Dense eigensolve, selection of the isolated real eigenvalue near E1 + omega,
// inverse-iteration refinement, normalization <xi, sigma3 xi> = 1 with
// <xi_1, phi_1> > 0. Throws NumericalFailure if no eigenvalue is found or
// the sigma3-pairing is not positive.
void internal_mode(LinearizationData& data, const RealField& phi1);

// Same refinement from a nearby guess, without the dense eigensolve.
void refine_internal_mode(LinearizationData& data, double lambda_guess, const Eigen::VectorXcd& xi_guess,
                          const RealField& phi1);

// Internal mode without the dense eigensolve: inverse iteration from
// (phi_1, 0) at the shift E1 + omega, repeated at the improved eigenvalue.
void internal_mode_iterative(LinearizationData& data, const RealField& phi1);

// d xi / d omega, normalized by <dxi, sigma3 xi> = 0, and d lambda / d omega.
struct InternalModeDerivative {
    Eigen::VectorXcd dxi;
    double dlambda = 0.0;
};
InternalModeDerivative internal_mode_derivative(const LinearizationData& data);

struct NonresonanceReport {
    double margin = 0.0;
    int n_max = 0;
    int worst_n = 0;
    bool pass = false;
};

NonresonanceReport nonresonance_margin(double lambda, double omega);
NonresonanceReport nonresonance_certificate(const LinearizationData& data);

struct SpectralProjections {
    Eigen::MatrixXd P_ng;
    Eigen::MatrixXd P_disc;  // P_lambda + P_minus_lambda
    Eigen::MatrixXd P_c;
    Eigen::MatrixXd P_plus;
    Eigen::MatrixXd P_minus;
    std::vector<cplx> cluster;  // continuous-cluster eigenvalues
    double max_cluster_imag = 0.0;
};

SpectralProjections spectral_projections(const LinearizationData& data);

// Operator norm of W^2 (P_c sigma3 - (P_plus - P_minus)) W^2 with W = diag <n>.
double projection_defect_weighted_norm(const SpectralProjections& p, const Lattice& lat);

// Solves (H - mu) x = b on Ran P_c (b is projected first); adjoint uses
// H^* = sigma3 H sigma3. Returns the relative residual through `residual`.
Eigen::VectorXcd solve_on_continuous(const LinearizationData& data, cplx mu, const Eigen::VectorXcd& b,
                                     bool adjoint = false, double* residual = nullptr);

// Windowed continuous-cluster eigenvalues (needs data.eigenvalues).
std::vector<double> continuous_cluster(const LinearizationData& data);

nlohmann::json spectrum_report(const LinearizationData& data);

}  // namespace dnls
