#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace dnls {

// Serial variants are plain loops kept as the reference; Parallel variants
// use OpenMP with a fixed work decomposition, so results do not depend on
// the thread count.
enum class Exec { Serial, Parallel };

namespace kernels {

// y(i) = sum_k M(k, i) x(k), i.e. y = M^T x, for real column-major M.
void columns_dot(const Eigen::MatrixXd& M, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, Exec exec);

// y(i) = d(i) x(i) - x(i-1) - x(i+1) with zero Dirichlet data outside.
void tridiag_apply(const Eigen::VectorXd& d, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, Exec exec);

// Sum over i in [0, n) of contribution(i, acc), each call adding into acc.
// Parallel mode accumulates fixed chunks of `chunk` indices separately and
// adds the chunk totals in index order.
Eigen::VectorXcd indexed_sum(int n, Eigen::Index dim,
                             const std::function<void(int, Eigen::VectorXcd&)>& contribution, Exec exec,
                             int chunk = 8);

// out(i) = f(i) for i in [0, n).
void for_each_index(int n, const std::function<void(int)>& f, Exec exec);

int available_threads();

}  // namespace kernels
}  // namespace dnls
