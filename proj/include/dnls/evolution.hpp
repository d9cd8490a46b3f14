#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dnls/kernels.hpp"
#include "dnls/potentials.hpp"

namespace dnls {

// Precomputed e^{-iHt} for one t: a Chebyshev expansion in H for short
// times, eigenbasis phases otherwise.
struct PropagatorPlan {
    double t = 0.0;
    bool chebyshev = false;
    std::vector<cplx> coef;  // includes e^{-i c t} and the (2 - delta_k0) factor
    Eigen::VectorXcd phases;
};

// Exact windowed e^{-iHt}: eigendecomposition of H, with a Chebyshev
// expansion (tridiagonal products only) for short times. Both agree to
// round-off. Immutable once built, so it can be shared between trajectories.
class Propagator {
public:
    explicit Propagator(const Potential& q, Exec exec = Exec::Parallel);

    const Lattice& lattice() const { return lattice_; }
    const Eigen::VectorXd& eigenvalues() const { return values_; }
    const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
    Exec exec() const { return exec_; }

    LatticeField apply(double t, const LatticeField& u) const;
    PropagatorPlan plan(double t) const;
    LatticeField apply(const PropagatorPlan& plan, const LatticeField& u) const;
    // Chebyshev path regardless of t (reference comparisons).
    PropagatorPlan chebyshev_plan(double t) const;
    // e^{-iHt} with the phases precomputed by the caller.
    LatticeField apply_phases(const Eigen::VectorXcd& phases, const LatticeField& u) const;
    Eigen::VectorXcd phases(double t) const;

    // Removes the components along eigenvectors with eigenvalue outside [0, 4].
    LatticeField continuous_part(const LatticeField& u) const;
    std::vector<int> discrete_indices() const;

private:
    Lattice lattice_;
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;     // columns are eigenvectors
    Eigen::MatrixXd vectors_t_;   // transpose, so both products stream columns
    Eigen::VectorXd diag_;        // 2 + q - center
    double center_ = 0.0, half_width_ = 1.0;
    Exec exec_;
};

LatticeField linear_propagator_H(const Propagator& p, double t, const LatticeField& u);
LatticeField linear_propagator_H(const Potential& q, double t, const LatticeField& u);

// Kernel of the free flow i u_t = -Delta u from delta_0:
// e^{-2it} i^n J_n(2t).
cplx free_propagator_kernel(double t, int n);
// Same kernel on a whole window (one Bessel sweep).
LatticeField free_propagator_kernel(double t, const Lattice& lat);
// Free evolution of arbitrary data by convolution with the exact kernel
// (data supported inside the window, output on the same window).
LatticeField free_convolution(double t, const LatticeField& u);

// J_0(x), ..., J_{nmax}(x) by Miller's backward recurrence.
std::vector<double> bessel_j_sequence(int nmax, double x);

// u <- e^{i |u|^6 tau} u, the exact flow of the nonlinear part.
LatticeField nonlinear_substep(const LatticeField& u, double tau);

// One Strang step: half nonlinear, full linear, half nonlinear. |dt| <= 0.05.
LatticeField step(const Propagator& p, const LatticeField& u, double dt);
LatticeField step(const Potential& q, const LatticeField& u, double dt);

struct ConservedQuantities {
    double mass = 0.0;
    double energy = 0.0;
};

// mass = ||u||^2, energy = <Hu, u> - (1/4) sum |u|^8
ConservedQuantities conserved_quantities(const Potential& q, const LatticeField& u);

struct EvolutionConfig {
    double dt = 1e-2;
    double T = 1.0;
    double cadence = 0.5;
    bool store_snapshots = true;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<LatticeField> snapshots;  // empty unless store_snapshots
    std::vector<double> mass;
    std::vector<double> energy;

    double max_relative_mass_drift() const;
    double max_relative_energy_drift() const;
};

using Observer = std::function<void(double t, const LatticeField& u)>;

// Runs from t = 0 to cfg.T; samples at t = 0 and every cadence (rounded to
// whole steps) plus the final time.
Trajectory evolve(const Potential& q, const Propagator& p, const LatticeField& u0, const EvolutionConfig& cfg,
                  const Observer& observer = {});

struct DecayFitResult {
    double exponent = 0.0;
    double prefactor = 0.0;
    double rms_residual = 0.0;
    std::vector<double> times;
    std::vector<double> sup_norms;
    double max_boundary_mass = 0.0;
};

// Log-log least squares of sup_n |e^{-iHt} u0| against t. Throws DomainError
// for fewer than two times and NumericalFailure when more than 1e-6 of the
// mass reaches the outer eighth of the window.
DecayFitResult decay_exponent(const Propagator& p, const LatticeField& u0, const std::vector<double>& t_grid);

// Mass in the outer eighth of the window at each end.
double boundary_mass(const LatticeField& u);

std::vector<double> log_spaced(double a, double b, int count);

}  // namespace dnls
