// Serial reference kernels against their OpenMP variants: wall time and the
// largest difference between the two results.
#include <chrono>
#include <cstdio>
#include <functional>

#include "dnls/evolution.hpp"
#include "dnls/scattering.hpp"

using namespace dnls;

namespace {

template <typename F>
double best_of(int reps, F&& f)
{
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const char* name, double serial, double parallel, double diff)
{
    std::printf("%-34s serial %10.3f ms  parallel %10.3f ms  speedup %5.2f  max diff %.2e\n", name, 1e3 * serial,
                1e3 * parallel, serial / parallel, diff);
}

}  // namespace

int main()
{
    std::printf("threads: %d\n", kernels::available_threads());
    const Lattice lat = Lattice::symmetric(1024);
    const Potential q = make_potential("qstar", 0.3, lat);
    LatticeField u(lat);
    for (int i = 0; i < lat.size(); ++i) {
        const double x = (lat.site(i) - 10.0) / 30.0;
        u.values[i] = std::exp(-x * x) * std::polar(1.0, 0.7 * lat.site(i));
    }

    {
        Propagator ps(q, Exec::Serial), pp(q, Exec::Parallel);
        PropagatorPlan plan_s, plan_p;
        plan_s.phases = ps.phases(50.0);
        plan_p.phases = pp.phases(50.0);
        LatticeField a, b;
        double ts = best_of(5, [&] { a = ps.apply(plan_s, u); });
        double tp = best_of(5, [&] { b = pp.apply(plan_p, u); });
        row("eigenbasis propagator (t = 50)", ts, tp, (a.values - b.values).cwiseAbs().maxCoeff());

        auto cs = ps.plan(0.01), cp = pp.plan(0.01);
        ts = best_of(20, [&] { a = ps.apply(cs, u); });
        tp = best_of(20, [&] { b = pp.apply(cp, u); });
        row("Chebyshev propagator (dt = 0.01)", ts, tp, (a.values - b.values).cwiseAbs().maxCoeff());
    }
    {
        const auto thetas = [] {
            std::vector<double> t;
            for (int k = 1; k < 2000; ++k) t.push_back(3.14159 * k / 2000.0);
            return t;
        }();
        std::vector<ScatteringRow> a, b;
        double ts = best_of(3, [&] { a = scattering_sweep(q, thetas, Exec::Serial); });
        double tp = best_of(3, [&] { b = scattering_sweep(q, thetas, Exec::Parallel); });
        double d = 0.0;
        for (size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k].coeffs.T - b[k].coeffs.T));
        row("scattering sweep (2000 angles)", ts, tp, d);
    }
    {
        const Lattice small = Lattice::symmetric(256);
        const Potential qs = make_potential("qstar", 0.3, small);
        LatticeField v(small);
        for (int n = -3; n <= 3; ++n) v(n) = cplx(1.0 + n, 0.5 * n);
        LapOptions os, op;
        os.exec = Exec::Serial;
        op.exec = Exec::Parallel;
        LapResult a, b;
        double ts = best_of(1, [&] { a = limiting_absorption_projection(qs, v, os); });
        double tp = best_of(1, [&] { b = limiting_absorption_projection(qs, v, op); });
        row("limiting-absorption projection", ts, tp, (a.projection.values - b.projection.values).cwiseAbs().maxCoeff());
    }
    return 0;
}
