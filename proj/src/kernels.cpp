#include "dnls/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <vector>

namespace dnls::kernels {

using cplx = std::complex<double>;

void columns_dot(const Eigen::MatrixXd& M, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, Exec exec)
{
    const Eigen::Index rows = M.rows(), cols = M.cols();
    y.resize(cols);
    if (exec == Exec::Serial) {
        for (Eigen::Index i = 0; i < cols; ++i) {
            const double* c = M.data() + i * rows;
            double re = 0.0, im = 0.0;
            for (Eigen::Index k = 0; k < rows; ++k) {
                re += c[k] * x[k].real();
                im += c[k] * x[k].imag();
            }
            y[i] = {re, im};
        }
        return;
    }
    Eigen::MatrixX2d xs(rows, 2);
    xs.col(0) = x.real();
    xs.col(1) = x.imag();
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < cols; ++i) {
        Eigen::RowVector2d r = M.col(i).transpose() * xs;
        y[i] = {r[0], r[1]};
    }
}

void tridiag_apply(const Eigen::VectorXd& d, const Eigen::VectorXcd& x, Eigen::VectorXcd& y, Exec exec)
{
    const Eigen::Index n = x.size();
    y.resize(n);
    if (n == 0) return;
    if (n == 1) {
        y[0] = d[0] * x[0];
        return;
    }
    if (exec == Exec::Serial) {
        y[0] = d[0] * x[0] - x[1];
        for (Eigen::Index i = 1; i + 1 < n; ++i) y[i] = d[i] * x[i] - x[i - 1] - x[i + 1];
        y[n - 1] = d[n - 1] * x[n - 1] - x[n - 2];
        return;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < n; ++i) {
        cplx v = d[i] * x[i];
        if (i > 0) v -= x[i - 1];
        if (i + 1 < n) v -= x[i + 1];
        y[i] = v;
    }
}

Eigen::VectorXcd indexed_sum(int n, Eigen::Index dim,
                             const std::function<void(int, Eigen::VectorXcd&)>& contribution, Exec exec, int chunk)
{
    Eigen::VectorXcd total = Eigen::VectorXcd::Zero(dim);
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i) contribution(i, total);
        return total;
    }
    const int nchunks = (n + chunk - 1) / chunk;
    std::vector<Eigen::VectorXcd> partial(nchunks, Eigen::VectorXcd::Zero(dim));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < nchunks; ++c) {
        try {
            const int end = std::min(n, (c + 1) * chunk);
            for (int i = c * chunk; i < end; ++i) contribution(i, partial[c]);
        } catch (...) {
#pragma omp critical(dnls_kernel_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    for (const auto& p : partial) total += p;
    return total;
}

void for_each_index(int n, const std::function<void(int)>& f, Exec exec)
{
    if (exec == Exec::Serial) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            f(i);
        } catch (...) {
#pragma omp critical(dnls_kernel_error)
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
}

int available_threads() { return omp_get_max_threads(); }

}  // namespace dnls::kernels
