#pragma once

#include <map>
#include <random>

#include "dnls/linearization.hpp"

namespace fixture {

// Shared qstar(0.3) branch on a small window; built once per process.
inline const dnls::GroundStateBranch& branch(int half = 128)
{
    static std::map<int, dnls::GroundStateBranch> cache;
    auto it = cache.find(half);
    if (it == cache.end())
        it = cache.emplace(half, dnls::continue_branch(dnls::make_potential("qstar", 0.3, dnls::Lattice::symmetric(half))))
                 .first;
    return it->second;
}

inline double omega0(const dnls::GroundStateBranch& b) { return b.E0 + 0.5 * b.eta; }

inline const dnls::LinearizationData& linearization(int half = 128)
{
    static std::map<int, dnls::LinearizationData> cache;
    auto it = cache.find(half);
    if (it == cache.end()) {
        const auto& b = branch(half);
        dnls::LinearizationData lin = dnls::build_linearization(b, b.evaluate(omega0(b)));
        dnls::internal_mode(lin, b.phi1);
        it = cache.emplace(half, std::move(lin)).first;
    }
    return it->second;
}

inline Eigen::VectorXcd random_vector(Eigen::Index n, unsigned seed)
{
    std::mt19937_64 g(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXcd v(n);
    for (auto& x : v) x = {d(g), d(g)};
    return v;
}

inline dnls::LatticeField random_field(const dnls::Lattice& lat, unsigned seed)
{
    return dnls::LatticeField(lat, random_vector(lat.size(), seed));
}

}  // namespace fixture
