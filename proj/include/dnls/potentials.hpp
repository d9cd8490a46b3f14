#pragma once

#include "json.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

// Real potential q on a window. `field` holds the effective values
// (already multiplied by eps).
struct Potential {
    RealField field;
    double decay_rate = std::numeric_limits<double>::infinity();  // inf for compact support
    double eps = 1.0;
    std::string profile = "custom";

    const Lattice& lattice() const { return field.lattice; }
};

// Profiles: "zero", "qstar" (-1/2, 1, -1/2 at -1, 0, 1), "delta" (delta_0),
// "dipole" (delta_0 - delta_1), "pair" (delta_0 + delta_1),
// "tripole" (delta_-1 - 2 delta_0 + delta_1), "wide" (zero-sum, 5 sites).
Potential make_potential(const std::string& profile, double eps, const Lattice& lat = Lattice());

// Same profile carried to another window (values outside the old window are zero).
Potential on_lattice(const Potential& q, const Lattice& lat);

// Returns eps * q with eps recorded.
Potential scaled(const Potential& shape, double eps);

template <typename Scalar>
Field<Scalar> apply_H(const Potential& q, const Field<Scalar>& u)
{
    return apply_H(q.field, u);
}

// Support radius: max |n| with |q(n)| > 1e-14, or -1 for q = 0.
int support_radius(const Potential& q);

// sum_{mu,nu} |mu - nu| q(mu) q(nu)
double moment_functional(const Potential& q);

bool zero_sum_check(const Potential& q, double tol = 1e-12);

// <R_{-Delta}(z) q, q> for real z < 0.
double free_resolvent_pairing(const Potential& q, double z);

// z -> 0^- limit of free_resolvent_pairing, Richardson-extrapolated in
// kappa = arccosh(1 - z/2) from the three smallest |z| in the sequence.
// Throws DomainError when sum q != 0 (the limit diverges like 1/kappa).
double lemma_a2_limit(const Potential& q, const std::vector<double>& z_sequence);

std::vector<double> default_a2_sequence();

struct SpectrumPrediction {
    double E0_pred = 0.0;
    double E1_pred = 4.0;
};

// Small-coupling eigenvalue prediction for H = -Delta + eps*shape.
SpectrumPrediction predict_small_eps_spectrum(const Potential& shape, double eps);

struct HypothesisReport {
    double eps = 1.0;
    Lattice window;

    bool h1_ok = false;
    bool compact_support = false;
    double decay_rate = 0.0;
    double decay_constant = 0.0;  // max |q(n)| e^{|n|}

    bool h2_ok = false;
    cplx W0{0.0, 0.0};
    cplx Wpi{0.0, 0.0};

    bool h3_ok = false;
    int count_below_zero = 0;
    int count_above_four = 0;
    std::vector<double> eigenvalues;  // discrete eigenvalues (outside [0,4]), ascending
    double E0 = std::numeric_limits<double>::quiet_NaN();
    double E1 = std::numeric_limits<double>::quiet_NaN();
    double truncation_error_low = 0.0;
    double truncation_error_high = 0.0;

    std::optional<SpectrumPrediction> prediction;

    bool all_ok() const { return h1_ok && h2_ok && h3_ok; }
};

nlohmann::json to_json(const HypothesisReport& r);

// Certifies H = -Delta + eps*shape: decay of q, nonresonant band edges, and
// exactly one eigenvalue on each side of the band. The window is grown to at
// least 8/sqrt(E0_pred) sites when a small-eps prediction exists.
HypothesisReport validate_hypotheses(const Potential& shape, double eps,
                                     const std::optional<Lattice>& window = std::nullopt);

// Lowest and highest eigenvalue of the windowed H with eigenvectors
// (Sturm bisection plus inverse iteration, O(N)).
struct ExtremeEigenpair {
    double value = 0.0;
    RealField vector;
};
ExtremeEigenpair lowest_eigenpair(const Potential& q);
ExtremeEigenpair highest_eigenpair(const Potential& q);

}  // namespace dnls
