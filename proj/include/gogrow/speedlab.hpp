#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gogrow/core.hpp"
#include "gogrow/pde.hpp"

namespace gog {

struct SpeedEstimate {
    double slope;
    double intercept;
    std::pair<double, double> window;
    double rms_residual;
    int n_points;
    double min_slope;  ///< smallest finite-difference slope on the window
    double max_slope;  ///< largest finite-difference slope on the window
};

/// Least-squares line through (t, xbar) on the trailing `window_fraction`
/// of the run. The first 20% of the time span is always discarded.
SpeedEstimate estimate_speed(const std::vector<std::pair<double, double>>& trajectory,
                             double window_fraction = 0.5);

std::vector<std::pair<double, double>> positions(const std::vector<TrajectoryPoint>& traj);

struct BracketCheck {
    bool liminf_ok;
    bool limsup_ok;
};

/// liminf_ok: smallest trailing slope <= sigma* + tol; limsup_ok: largest
/// trailing slope >= sigma* - tol.
BracketCheck speed_bracket_check(const std::vector<std::pair<double, double>>& trajectory, double sigma_star,
                                 double tol, double window_fraction = 0.5);

enum class ModelKind { Parabolic, Kinetic };
/// Compact: step density with a tanh nutrient ramp. Wave: minimal-speed
/// profile, so the measured speed carries scheme error only.
enum class InitialData { Compact, Wave };

/// One spreading experiment from step data.
struct SpreadingSetup {
    ModelParams params;
    ModelKind model = ModelKind::Parabolic;
    InitialData initial = InitialData::Compact;
    double z_min = -50.0;
    double z_max = 250.0;
    double dz = 0.05;
    double dt = 0.02;
    double t_end = 80.0;
    double sample_interval = 0.5;
    double window_fraction = 0.5;
    Advection advection = Advection::Upwind1;  ///< parabolic runs only
};

/// Speed predicted by the minimal-speed formulas for the setup's model.
double predicted_speed(const SpreadingSetup& s);

struct SpreadingRun {
    std::vector<TrajectoryPoint> trajectory;
    SpeedEstimate estimate;
    long monotonicity_lost_steps = 0;  ///< steps ending with a dip in N behind the front
};

/// Dips in N far behind the front are counted, not fatal.
SpreadingRun run_spreading(const SpreadingSetup& s);

struct SweepRow {
    double chi;
    std::optional<double> epsilon;
    double dz;
    double dt;
    double measured_speed;
    double predicted_speed;
    double rel_error;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::vector<TrajectoryPoint>> trajectories;  ///< one per row
    /// Richardson limit from the two finest levels (first order in dz).
    std::optional<double> extrapolated_speed;
    std::optional<double> extrapolated_rel_error;
};

/// True when rel_error strictly decreases from row to row.
bool errors_decrease(const SweepResult& r);

/// Runs `levels` spreading experiments, halving dz and dt each time from the
/// base setup. Levels run concurrently.
SweepResult convergence_study(const SpreadingSetup& base, int levels);

/// Independent spreading runs, executed concurrently; row order follows the input.
SweepResult sweep(const std::vector<SpreadingSetup>& setups);

void write_sweep_csv(std::ostream& out, const SweepResult& r, const std::vector<std::string>& header);
/// JSON object {name: {predicted, measured, rel_error, ...}}.
std::string sweep_summary_json(const std::string& name, const SweepResult& r);

}  // namespace gog
