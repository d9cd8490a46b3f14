#include "dnls/tridiagonal.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dnls {

SymTridiagonal SymTridiagonal::schrodinger(const RealField& q, double shift)
{
    SymTridiagonal t;
    const int n = q.size();
    t.diag = q.values.array() + 2.0 + shift;
    t.off = Eigen::VectorXd::Constant(n - 1, -1.0);
    return t;
}

template <typename V>
static V apply_impl(const SymTridiagonal& t, const V& x)
{
    const int n = t.size();
    V y(n);
    for (int i = 0; i < n; ++i) {
        auto s = t.diag[i] * x[i];
        if (i > 0) s += t.off[i - 1] * x[i - 1];
        if (i + 1 < n) s += t.off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

Eigen::VectorXd SymTridiagonal::apply(const Eigen::VectorXd& x) const { return apply_impl(*this, x); }
Eigen::VectorXcd SymTridiagonal::apply(const Eigen::VectorXcd& x) const { return apply_impl(*this, x); }

double SymTridiagonal::lower_bound() const
{
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < size() ? std::abs(off[i]) : 0.0);
        lo = std::min(lo, diag[i] - r);
    }
    return lo;
}

double SymTridiagonal::upper_bound() const
{
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        double r = (i > 0 ? std::abs(off[i - 1]) : 0.0) + (i + 1 < size() ? std::abs(off[i]) : 0.0);
        hi = std::max(hi, diag[i] + r);
    }
    return hi;
}

int count_below(const SymTridiagonal& t, double x)
{
    const double pivmin = std::numeric_limits<double>::min() * 4.0;
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < t.size(); ++i) {
        double b2 = i > 0 ? t.off[i - 1] * t.off[i - 1] : 0.0;
        d = (t.diag[i] - x) - (i > 0 ? b2 / d : 0.0);
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0) ++count;
    }
    return count;
}

double eigenvalue_by_index(const SymTridiagonal& t, int k)
{
    if (k < 0 || k >= t.size()) throw DomainError("eigenvalue index out of range");
    double lo = t.lower_bound(), hi = t.upper_bound();
    const double scale = std::max(std::abs(lo), std::abs(hi));
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * scale * 0.25) break;
        if (mid <= lo || mid >= hi) break;
        if (count_below(t, mid) > k)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd solve(const SymTridiagonal& t, const Eigen::VectorXd& rhs, double shift)
{
    const int n = t.size();
    Eigen::VectorXd dl = t.off, du = t.off;
    Eigen::VectorXd d = t.diag.array() + shift;
    Eigen::VectorXd x = rhs;
    lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, n, 1, dl.data(), d.data(), du.data(), x.data(), n);
    if (info != 0) throw NumericalFailure("tridiagonal solve is singular (dgtsv info " + std::to_string(info) + ")");
    return x;
}

Eigen::VectorXd inverse_iteration(const SymTridiagonal& t, double lambda, int iterations)
{
    const int n = t.size();
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
    double nudge = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd y;
        for (int attempt = 0;; ++attempt) {
            try {
                y = solve(t, x, -(lambda + nudge));
                break;
            } catch (const NumericalFailure&) {
                if (attempt > 4) throw;
                nudge = (nudge == 0.0 ? 1e-14 : 10.0 * nudge) * std::max(1.0, std::abs(lambda));
            }
        }
        double nrm = y.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) throw NumericalFailure("inverse iteration broke down");
        x = y / nrm;
    }
    return x;
}

TridiagonalEigensystem eigensystem(const SymTridiagonal& t)
{
    const int n = t.size();
    TridiagonalEigensystem es;
    es.values = t.diag;
    Eigen::VectorXd e = t.off;
    es.vectors.resize(n, n);
    lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', n, es.values.data(), e.data(), es.vectors.data(), n);
    if (info != 0) throw NumericalFailure("dstevd failed with info " + std::to_string(info));
    return es;
}

}  // namespace dnls
