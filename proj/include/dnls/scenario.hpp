#pragma once

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dnls/checks.hpp"

namespace dnls {

enum class ScenarioKind {
    StandingWave,
    InternalModeKick,
    RadiationKick,
    MixedKick,
    ContrastSingleEigenvalue,
    FreeDecay
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ScenarioConfig {
    std::string profile = "qstar";
    double eps = 0.3;
    int window = 512;  // half-width: sites -window..window
    std::optional<double> eta;
    int count = 8;
    ScenarioKind kind = ScenarioKind::InternalModeKick;
    double kick = 1e-2;
    EvolutionConfig evolution{0.01, 100.0, 0.5, false};
    bool falsifier = true;
    bool normal_form = false;
    std::filesystem::path out_dir = "out";
    unsigned long long seed = 1;

    // Defaults per kind (the contrast kind switches to q = -0.5 delta_0).
    static ScenarioConfig preset(ScenarioKind kind);
    static ScenarioConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    std::string hash() const;
    // Throws DomainError on invalid settings.
    void validate() const;
};

struct Report {
    std::string scenario;
    std::vector<CheckRecord> checks;
    nlohmann::json environment;
    std::string config_hash;
    std::string failed_stage;  // empty when the pipeline completed
    std::string failure;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

nlohmann::json environment_fingerprint();

// validate -> branch -> linearize -> initial data -> evolve/track ->
// diagnostics. Writes trajectory.csv, summary.json and plot.py into
// cfg.out_dir (normal_form.json and transformed.csv when enabled). Stage
// failures are recorded in the report, not thrown.
Report run_scenario(const ScenarioConfig& cfg, const CheckOptions& o = {});

// Report wrapping the twelve acceptance checks.
Report acceptance_report(const CheckOptions& o = {});

// Writes the modulation trajectory as CSV with columns
// t omega gamma abs_z arg_z f_wnorm r_norm infdist.
void write_modulation_csv(const std::filesystem::path& path, const ModulationTrajectory& mt);

// JSON manifest plus one field file per A coefficient and generator.
void save_normal_form(const std::filesystem::path& dir, const NormalFormSystem& sys, const Generators& gen);

}  // namespace dnls
