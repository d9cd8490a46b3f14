#pragma once

#include <Eigen/Dense>

#include "dnls/lattice.hpp"

namespace dnls {

// Real symmetric tridiagonal matrix stored by its diagonal and off-diagonal.
struct SymTridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd off;  // length size()-1

    int size() const { return int(diag.size()); }

    // Matrix of H + shift on the window: diagonal 2 + q + shift, off-diagonal -1.
    static SymTridiagonal schrodinger(const RealField& q, double shift = 0.0);

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
    double lower_bound() const;  // Gershgorin
    double upper_bound() const;
};

// Number of eigenvalues strictly below x (Sturm sequence).
int count_below(const SymTridiagonal& t, double x);

// k-th smallest eigenvalue (k = 0 is the lowest), by bisection.
double eigenvalue_by_index(const SymTridiagonal& t, int k);

// Eigenvector for an accurately known eigenvalue, by inverse iteration.
// Normalized in l^2; sign left to the caller.
Eigen::VectorXd inverse_iteration(const SymTridiagonal& t, double lambda, int iterations = 3);

// Solves (T + shift) x = rhs with partially pivoted LU.
Eigen::VectorXd solve(const SymTridiagonal& t, const Eigen::VectorXd& rhs, double shift = 0.0);

struct TridiagonalEigensystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns
};

TridiagonalEigensystem eigensystem(const SymTridiagonal& t);

}  // namespace dnls
