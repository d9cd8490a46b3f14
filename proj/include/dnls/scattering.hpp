#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnls/kernels.hpp"
#include "dnls/potentials.hpp"

namespace dnls {

// Boundary value of the resolvent on the band: Plus is lambda + i0, Minus is
// lambda - i0. On the branch Im theta <= 0, lambda + i0 corresponds to
// theta in (-pi, 0).
enum class Side { Plus, Minus };

// Solves 2(1 - cos theta) = z with Im theta <= 0. Points of [0, 4] need a side.
cplx theta_from_spectral(cplx z, std::optional<Side> side = std::nullopt);

struct JostData {
    cplx theta;
    cplx lambda;
    // Both functions live on the window extended by one ghost site per side.
    LatticeField f_plus;
    LatticeField f_minus;
    cplx wronskian;
    double wronskian_spread = 0.0;     // max |W(nu) - W| / max(1, |W|)
    double recursion_residual = 0.0;   // max |(H - lambda) f| / max |f|, both functions
};

// f_+ ~ e^{-i nu theta} at the right edge, f_- ~ e^{i nu theta} at the left.
// W = f_+(nu+1) f_-(nu) - f_+(nu) f_-(nu+1).
JostData jost(const Potential& q, cplx theta);

struct ScatteringCoefficients {
    cplx T;
    cplx R_plus;
    cplx R_minus;
};

// T = -2i sin(theta) / W, so T = 1 for q = 0; real theta in (0, pi) only.
ScatteringCoefficients scattering_coefficients(const JostData& j);

// Max over the window of |f_-/f_+ connection residuals|, i.e. of
// f_-(nu) - conj(f_+)/T - R_+ f_+/T and the mirrored identity.
double connection_residual(const JostData& j, const ScatteringCoefficients& s);

struct ScatteringRow {
    cplx theta;
    cplx W;
    ScatteringCoefficients coeffs;
};

std::vector<ScatteringRow> scattering_sweep(const Potential& q, const std::vector<double>& thetas,
                                            Exec exec = Exec::Parallel);

struct ResonanceReport {
    cplx W0;
    cplx Wpi;
    bool h2_ok = false;
};

ResonanceReport resonance_check(const Potential& q);

cplx free_resolvent_kernel(cplx z, int mu, int nu, std::optional<Side> side = std::nullopt);

// R^{+/-}_H(lambda; mu, nu) = -f_+(max) f_-(min) / W.
cplx resolvent_kernel_H(const Potential& q, double lambda, Side side, int mu, int nu);

// (R^{+/-}_H(lambda) u) on the window extended by one ghost site per side.
LatticeField apply_resolvent_extended(const Potential& q, double lambda, Side side, const LatticeField& u);
LatticeField apply_resolvent_extended(const JostData& j, const LatticeField& u);

// ||(H - lambda) R u - u||_2 / ||u||_2 using the infinite-lattice stencil.
double resolvent_identity_residual(const Potential& q, double lambda, Side side, const LatticeField& u);

struct LapOptions {
    int initial_nodes = 256;
    int max_nodes = 1 << 16;
    double tolerance = 1e-12;  // relative change between doublings
    Exec exec = Exec::Parallel;
};

struct LapResult {
    LatticeField projection;
    int nodes = 0;
    double last_change = 0.0;
};

// P_c u = (1/2 pi i) int_0^4 (R^+ - R^-) u d lambda, integrated in theta with
// the trapezoidal rule (the integrand is smooth, even and 2pi-periodic).
LapResult limiting_absorption_projection(const Potential& q, const LatticeField& u, const LapOptions& opts = {});

}  // namespace dnls
