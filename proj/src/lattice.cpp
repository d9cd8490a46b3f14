#include "dnls/lattice.hpp"

#include <vector>

namespace dnls {

Lattice::Lattice(int lo, int hi) : n_min(lo), n_max(hi)
{
    if (!(lo < 0 && 0 < hi)) throw DomainError("lattice window must contain the origin strictly inside");
    if (hi - lo + 1 < 32) throw DomainError("lattice window must have at least 32 sites");
}

Eigen::VectorXd weight_vector(const Lattice& lat, double sigma)
{
    Eigen::VectorXd w(lat.size());
    for (int i = 0; i < lat.size(); ++i) w[i] = std::pow(japanese_bracket(lat.site(i)), sigma);
    return w;
}

DecayFit fit_exponential_decay(const Eigen::VectorXd& magnitudes, const Lattice& lat)
{
    if (magnitudes.size() != lat.size()) throw DomainError("magnitude vector does not match lattice");
    if (magnitudes.maxCoeff() == 0.0) throw DomainError("cannot fit decay of an all-zero field");

    std::vector<double> xs, ys;
    for (int i = 0; i < lat.size(); ++i) {
        if (magnitudes[i] > 1e-13) {
            xs.push_back(std::abs(lat.site(i)));
            ys.push_back(std::log(magnitudes[i]));
        }
    }
    DecayFit fit;
    fit.samples = int(xs.size());
    if (xs.size() < 2) return fit;

    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) return fit;
    double slope = sxy / sxx;
    double intercept = my - slope * mx;
    double ss = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    fit.rate = -slope;
    fit.prefactor = std::exp(intercept);
    fit.rms_residual = std::sqrt(ss / double(xs.size()));
    // One e-fold of RMS scatter still reads as an exponential envelope; this
    // tolerates the Dirichlet edge bend of windowed bound states.
    fit.ok = fit.rate > 1e-8 && fit.rms_residual <= 1.0;
    return fit;
}

}  // namespace dnls
