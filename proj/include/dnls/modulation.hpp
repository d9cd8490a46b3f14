#pragma once

#include <optional>
#include <vector>

#include "dnls/evolution.hpp"
#include "dnls/linearization.hpp"

namespace dnls {

// u = e^{i theta} (phi_omega + r) with <Re r, phi> = <Im r, dphi> = 0.
// theta is the total phase; gamma = theta - int omega is formed by track().
struct ModulationState {
    double omega = 0.0;
    double theta = 0.0;
    LatticeField r;
    GroundStatePoint point;
    int iterations = 0;
    // max(|<Re r, phi>| / ||phi||, |<Im r, dphi>| / ||dphi||)
    double orthogonality = 0.0;
};

// Branch points near a cached reference from the second-order Taylor
// expansion in omega. Keeps the decomposition free of the round-off noise
// of repeated Newton solves when omega barely moves between samples.
class LocalBranch {
public:
    explicit LocalBranch(const GroundStateBranch& b, double relative_radius = 1e-5) : branch_(b), radius_(relative_radius) {}
    const GroundStateBranch& branch() const { return branch_; }
    GroundStatePoint operator()(double omega);

private:
    const GroundStateBranch& branch_;
    double radius_;
    std::optional<GroundStatePoint> ref_;
};

// Relative orthogonality residual: orthogonality / max(||r||, 1e-4 ||u||).
double orthogonality_relative(const ModulationState& s);

// Two-variable Newton on (omega, theta) from the guess. Throws
// NumericalFailure when Newton fails (outside the tube) and DomainError when
// omega leaves the branch interval.
ModulationState decompose(const LatticeField& u, const GroundStateBranch& branch, double omega_guess,
                          double theta_guess, int max_iterations = 30);
ModulationState decompose(const LatticeField& u, LocalBranch& branch, double omega_guess, double theta_guess,
                          int max_iterations = 30);

// Runs Newton from the guess and from perturbed starts; returns the largest
// disagreement in (omega, theta).
double decompose_multistart_spread(const LatticeField& u, const GroundStateBranch& branch, double omega_guess,
                                   double theta_guess);

struct DiscreteContinuousSplit {
    cplx z{0.0, 0.0};
    SpinorField f;
    double pc_defect = 0.0;       // ||P_c f - f|| / ||R||
    double reality_defect = 0.0;  // ||sigma1 f - conj f|| / ||f||
};

// z = <R, sigma3 xi>, f = R - z xi - conj(z) sigma1 xi for R = (r, conj r).
DiscreteContinuousSplit split_discrete_continuous(const LatticeField& r, const LinearizationData& lin);
DiscreteContinuousSplit split_discrete_continuous(const SpinorField& R, const LinearizationData& lin);

// Nonlinear remainder N(r, conj r) of the r-equation: everything in
// -|phi + r|^6 (phi + r) beyond linear order.
LatticeField nonlinear_remainder(const RealField& phi, const LatticeField& r);

struct ModulationRates {
    double omega_dot = 0.0;
    double gamma_dot = 0.0;
    double reality_defect = 0.0;  // |Re(i omega_dot)| + |Im(gamma_dot)| from the complex solve
    double condition = 0.0;       // |det| / q'^2 of the left matrix
};

// 2x2 solve for (i omega_dot, -gamma_dot) with left matrix q' I plus the
// <r +- conj r, .> corrections and right side from N projected on phi, dphi.
ModulationRates modulation_rhs(const LatticeField& r, const GroundStatePoint& p);

struct FalsifierPoint {
    double distance = 0.0;
    double kappa = 0.0;
    double mu = 0.0;
    bool escaped = false;  // minimizer pinned at the branch boundary
};

// inf over (kappa, mu) of ||u - e^{i kappa} phi_mu||_{l^{2,-sigma}}, by
// Newton in mu from mu_guess (kappa is optimal in closed form).
FalsifierPoint stability_falsifier(const LatticeField& u, const GroundStateBranch& branch, double sigma,
                                   double mu_guess);

struct ModulationSample {
    double t = 0.0;
    double omega = 0.0;
    double theta = 0.0;
    double gamma = 0.0;
    cplx z{0.0, 0.0};
    double f_wnorm = 0.0;  // ||f||_{l^{2,-2}}
    double r_norm = 0.0;
    double infdist = std::numeric_limits<double>::quiet_NaN();
    bool infdist_escaped = false;
    double omega_dot = 0.0;  // from the modulation equations
    double gamma_dot = 0.0;
    double orthogonality = 0.0;  // relative
    int iterations = 0;
    double lambda = 0.0;
    double pc_defect = 0.0;
    std::vector<cplx> f_pairings;  // <f, B_k> for the requested functionals
};

struct ModulationTrajectory {
    std::vector<ModulationSample> samples;
    double f_l2_integral = 0.0;  // int ||f||^2_{l^{2,-2}} dt (trapezoid)
    int bisections = 0;
    double max_orthogonality = 0.0;
    double max_reconstruction = 0.0;
    bool tube_exit = false;
    std::string failure;
};

struct TrackOptions {
    double sigma = 2.0;
    bool falsifier = true;
    std::vector<Eigen::VectorXcd> f_functionals;
    int newton_budget = 10;  // more iterations than this triggers bisection
    int max_bisection_depth = 6;
};

// Sample-by-sample tracker fed by an evolution observer. Samples needing
// more than newton_budget Newton iterations are refined by integrating from
// the previous sample to the interval midpoint first.
class Tracker {
public:
    Tracker(const GroundStateBranch& branch, const Propagator& p, double dt, double omega_guess, double theta_guess,
            TrackOptions opts = {});

    void observe(double t, const LatticeField& u);
    const ModulationTrajectory& result() const { return mt_; }
    ModulationTrajectory take() { return std::move(mt_); }

private:
    ModulationState decompose_with_refinement(double t, const LatticeField& u, int depth);
    void record(double t, const LatticeField& u, const ModulationState& s);

    const GroundStateBranch& branch_;
    LocalBranch local_;
    const Propagator& prop_;
    double dt_;
    TrackOptions opts_;
    double omega_prev_, theta_prev_;
    std::optional<double> t_prev_;
    LatticeField u_prev_;
    std::optional<LinearizationData> lin_;
    ModulationTrajectory mt_;
    bool has_mode_;
};

struct TrackedRun {
    Trajectory trajectory;
    ModulationTrajectory modulation;
};

// Evolves u0 and tracks every observer sample.
TrackedRun track(const Potential& q, const Propagator& p, const LatticeField& u0, const EvolutionConfig& cfg,
                 const GroundStateBranch& branch, double omega_guess, double theta_guess, TrackOptions opts = {});

struct PersistenceMetric {
    double min_ratio = 0.0;  // min |z(t)| / |z(0)|
    double drift = 0.0;      // max | |z(t)|^2 - |z(0)|^2 |
    double oscillation = 0.0;  // max |z|^2 - min |z|^2
};

// Throws DomainError when |z(0)| = 0.
PersistenceMetric persistence_metric(const ModulationTrajectory& mt);

// Fourth-order centered differences of a uniformly sampled series (ends use
// lower order).
std::vector<double> centered_derivative(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace dnls
