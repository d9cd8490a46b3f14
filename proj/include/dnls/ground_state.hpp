#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dnls/potentials.hpp"

namespace dnls {

// F(phi) = H phi + omega phi - phi^7
RealField ground_state_residual(const Potential& q, double omega, const RealField& phi);

// c(omega) phi0 with c = (omega - E0)^{1/6} ||phi0||_8^{-4/3}; zero at omega = E0.
RealField bifurcation_seed(const RealField& phi0, double E0, double omega);

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

// Newton on F with Jacobian L_+ = H + omega - 7 phi^6. Throws NumericalFailure
// on divergence or when the converged solution is not positive on the
// central half of the window.
RealField solve_ground_state(const Potential& q, double omega, const RealField& seed,
                             NewtonReport* report = nullptr, double tol = 1e-12);

// d phi / d omega from L_+ v = -phi.
RealField omega_derivative(const Potential& q, double omega, const RealField& phi);
// d^2 phi / d omega^2 from L_+ w = -2 dphi + 42 phi^5 dphi^2.
RealField omega_second_derivative(const Potential& q, double omega, const RealField& phi, const RealField& dphi);

struct GroundStatePoint {
    double omega = 0.0;
    RealField phi;
    RealField dphi;
    RealField d2phi;
    double mass = 0.0;        // ||phi||^2
    double mass_prime = 0.0;  // 2 <phi, dphi>
};

struct BranchConfig {
    std::optional<double> eta;   // default: default_eta(E0, E1)
    int count = 8;               // grid points E0 + eta k/(count+1), k = 1..count
    std::vector<double> omegas;  // explicit grid; overrides count
};

double default_eta(double E0, double E1);

struct GroundStateBranch {
    Potential q;
    std::string q_hash;
    double E0 = 0.0;
    double E1 = 0.0;  // NaN when H has no eigenvalue above 4
    RealField phi0;
    RealField phi1;   // empty lattice default when E1 is NaN
    double eta = 0.0;

    std::vector<double> omegas;
    std::vector<RealField> phi;
    std::vector<RealField> dphi;
    std::vector<double> mass;
    std::vector<double> mass_prime;
    std::vector<double> mass_prime_fd;
    std::vector<double> residual;
    std::vector<double> implicit_residual;
    std::vector<int> newton_iterations;

    bool contains(double omega) const { return omega > E0 && omega <= E0 + eta; }

    // Any omega in (E0, E0 + eta]: Hermite-cubic seed from the grid, then
    // Newton polish, so the returned point solves the stationary equation.
    GroundStatePoint evaluate(double omega) const;
    GroundStatePoint at_grid(size_t k) const;
};

GroundStateBranch continue_branch(const Potential& q, const BranchConfig& cfg = {});

// JSON manifest plus one field file per grid point and per derivative.
void save_branch(const GroundStateBranch& b, const std::filesystem::path& dir);
GroundStateBranch load_branch(const std::filesystem::path& dir);

}  // namespace dnls
