#pragma once

#include <string>
#include <vector>

#include "gogrow/core.hpp"

namespace gog {

enum class ScenarioKind { WaveTable, ParabolicRun, KineticRun, InsideRun, SpeedSweep };

std::string to_string(ScenarioKind k);
/// Inverse of to_string; throws ConfigError for unknown names.
ScenarioKind scenario_kind_from_string(const std::string& name);

struct GridSpec {
    double z_min = -50.0;
    double z_max = 150.0;
    double dz = 0.05;
    bool operator==(const GridSpec&) const = default;
};

struct SchemeSpec {
    double dt = 0.01;
    double theta = 0.5;
    std::string advection = "upwind1";  ///< upwind1 | central2
    double tmax = 5.0;
    double sample_interval = 0.1;
    int levels = 1;                ///< speed_sweep: refinement levels per chi (1 = single run)
    double window_fraction = 0.5;  ///< speed_sweep: trailing fit window
    bool operator==(const SchemeSpec&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    ScenarioKind kind = ScenarioKind::WaveTable;
    ModelParams params;
    std::vector<double> chi_values{0.5, 1.0, 1.5, 2.0, 3.0};
    std::string initial = "wave";    ///< wave | spreading
    std::string dynamics = "parabolic"; ///< parabolic | kinetic (speed_sweep)
    GridSpec grid;
    SchemeSpec scheme;
    std::string output_dir = "out";
    std::vector<double> snapshot_times;

    bool operator==(const Scenario&) const = default;
    /// Throws ConfigError when a value is outside what its kind accepts.
    void validate() const;
};

/// Line-based `key = value` text with [model], [grid], [scheme], [output]
/// sections; `name` and `kind` precede the first section. `#` starts a comment.
/// Validates the result unless `validate` is false.
Scenario parse_config(const std::string& text, bool validate = true);

/// Inverse of parse_config; reals are written with 17 significant digits.
std::string to_config_text(const Scenario& s);

struct ScenarioOutcome {
    int exit_code = 0;  ///< 0 success, 1 numerical failure, 2 configuration error
    std::string error;  ///< one-line message when exit_code != 0
    std::vector<std::string> files;
};

/// Runs a scenario, writing into s.output_dir. Never throws for module
/// errors; they are mapped to exit codes.
ScenarioOutcome run_scenario(const Scenario& s);

}  // namespace gog
