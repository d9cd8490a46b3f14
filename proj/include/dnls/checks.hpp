#pragma once

#include "json.hpp"

#include <functional>
#include <string>
#include <vector>

#include "dnls/evolution.hpp"
#include "dnls/modulation.hpp"
#include "dnls/normal_form.hpp"

namespace dnls {

struct CheckRecord {
    int id = 0;
    std::string name;
    std::string anchor;  // the property the check exercises
    double measured = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how measured is compared with tolerance
    bool pass = false;
    double seconds = 0.0;
    std::string error;  // stage failure message, empty on success
    nlohmann::json details = nlohmann::json::object();
};

nlohmann::json to_json(const CheckRecord& c);
std::string summary_line(const CheckRecord& c);

// Initial data.
// phi + eps (xi_1 + xi_2): the top component of z xi + conj(z) sigma1 xi at z = eps.
LatticeField internal_mode_kick(const GroundStatePoint& p, const LinearizationData& lin, double eps);
// Gaussian packet amp e^{-((n - center)/width)^2} e^{i (k0 n + psi)}, projected
// onto the continuous subspace of lin; psi is drawn from the seed.
LatticeField radiation_packet(const LinearizationData& lin, double amp, double center, double width, double k0,
                              unsigned long long seed);

// Shared long run on the two-eigenvalue operator, used by the persistence
// and falsifier checks.
struct PersistenceRun {
    int half = 512;
    double eps = 1e-2;
    double omega0 = 0.0;
    double zeta_bound = 0.0;  // 0.25 |z(0)| ||xi_1||_{l^{2,-2}}
    ModulationTrajectory modulation;
    TransformedSeries transformed;
    double seconds = 0.0;
};

struct CheckOptions {
    // Multiplies every run length (T); 1 reproduces the acceptance settings.
    double time_scale = 1.0;
    std::function<void(const std::string&)> log;
};

CheckRecord check_free_kernel(const CheckOptions& o = {});        // 1
CheckRecord check_dispersive_decay(const CheckOptions& o = {});   // 2
CheckRecord check_zero_energy_limit(const CheckOptions& o = {});  // 3
CheckRecord check_hypotheses(const CheckOptions& o = {});         // 4
CheckRecord check_branch(const CheckOptions& o = {});             // 5
CheckRecord check_linearization(const CheckOptions& o = {});      // 6
CheckRecord check_conservation(const CheckOptions& o = {});       // 7
CheckRecord check_modulation(const CheckOptions& o = {});         // 8
PersistenceRun persistence_run(const CheckOptions& o = {});
CheckRecord check_persistence(const PersistenceRun& run);        // 9
CheckRecord check_falsifier(const PersistenceRun& run, const CheckOptions& o = {});  // 10
CheckRecord check_normal_form(const CheckOptions& o = {});        // 11
CheckRecord check_lap_projection(const CheckOptions& o = {});     // 12

// All twelve in order; failures inside a check are recorded, never thrown.
std::vector<CheckRecord> run_all_checks(const CheckOptions& o = {});

}  // namespace dnls
