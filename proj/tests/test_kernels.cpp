#include "doctest.h"

#include "dnls/kernels.hpp"
#include "fixtures.hpp"

using namespace dnls;

TEST_CASE("serial and parallel kernels agree")
{
    const int n = 300;
    Eigen::MatrixXd M = Eigen::MatrixXd::Random(n, n);
    const Eigen::VectorXcd x = fixture::random_vector(n, 1);
    Eigen::VectorXcd a(n), b(n);
    kernels::columns_dot(M, x, a, Exec::Serial);
    kernels::columns_dot(M, x, b, Exec::Parallel);
    CHECK((a - M.transpose().cast<cplx>() * x).norm() <= 1e-12 * a.norm());
    CHECK((a - b).norm() <= 1e-13 * a.norm());

    const Eigen::VectorXd d = Eigen::VectorXd::Random(n);
    kernels::tridiag_apply(d, x, a, Exec::Serial);
    kernels::tridiag_apply(d, x, b, Exec::Parallel);
    CHECK(a == b);
    for (int i : {0, 7, n - 1}) {
        cplx want = d[i] * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0);
        CHECK(std::abs(a[i] - want) <= 1e-14);
    }

    auto contrib = [&](int i, Eigen::VectorXcd& acc) { acc += x[i] * M.col(i).cast<cplx>(); };
    const Eigen::VectorXcd s = kernels::indexed_sum(n, n, contrib, Exec::Serial);
    const Eigen::VectorXcd p = kernels::indexed_sum(n, n, contrib, Exec::Parallel);
    CHECK((s - M.cast<cplx>() * x).norm() <= 1e-12 * s.norm());
    CHECK((s - p).norm() <= 1e-12 * s.norm());

    std::vector<int> hit(n, 0);
    kernels::for_each_index(n, [&](int i) { hit[i] += 1; }, Exec::Parallel);
    for (int h : hit) CHECK(h == 1);
}
