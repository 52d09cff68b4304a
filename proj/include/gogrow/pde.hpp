#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gogrow/core.hpp"

namespace gog {

/// Upwind1: explicit first-order upwind flux. Central2: centred flux at
/// interior faces, advanced with the same theta weight as the diffusion
/// (second order while the cell Peclet number |u| dz stays below 2).
enum class Advection { Upwind1, Central2 };
enum class Splitting { Strang };
/// Collision update of the two-velocity model over one step h, as the factor
/// r applied to f - M rho: Exact e^{-h/eps^2}; Backward 1/(1 + h/eps^2);
/// Trapezoidal (1 - h/(2 eps^2)) / (1 + h/(2 eps^2)). Trapezoidal keeps the
/// diffusion of the shift scheme exact; it stays positive while h <= 2 eps^2.
enum class Relaxation { Exact, Backward, Trapezoidal };
enum class InterfaceUpdate { RootThenStep };

struct SchemeConfig {
    double dt = 0.01;
    double theta = 0.5;  ///< implicit weight of the diffusion terms
    Advection advection = Advection::Upwind1;
    Splitting splitting = Splitting::Strang;
    InterfaceUpdate interface_update = InterfaceUpdate::RootThenStep;
    Relaxation relaxation = Relaxation::Trapezoidal;  ///< two-velocity model only
    // Sub-process switches for verification runs; all on for the model.
    bool growth = true;
    bool consumption = true;
    bool nutrient_diffusion = true;
    bool transport = true;

    void validate() const;
};

struct InterfaceRecord {
    double time;
    double xbar;
    double xdot;
    double dn_min;
};

/// Position where the nondecreasing nutrient crosses n_th, by linear
/// interpolation between the bracketing centres.
double interface_position(const Field& n, double n_th);

/// Same interpolation, but only asks for a single upward crossing of n_th;
/// the nutrient may dip elsewhere. Throws MonotonicityLost on a second crossing.
double threshold_crossing(const Field& n, double n_th);

/// Minimum forward difference of n divided by dz (signed).
double monotonicity_margin(const Field& n);

struct StepResult {
    State state;
    bool monotonicity_lost = false;
};

/// One Strang step of the lab-frame model. The threshold is located from the
/// current nutrient; when it falls inside a cell the advective and growth
/// indicators are taken as the covered fractions.
StepResult step_static(const State& s, const ModelParams& p, const SchemeConfig& cfg);

/// One Strang step in a frame moving at `xdot`, with the threshold pinned at
/// z = 0.
StepResult step_moving(const State& s, const ModelParams& p, double xdot, const SchemeConfig& cfg);

struct VelocityEstimate {
    double ode;    ///< -dN/dt / dN/dx at the threshold
    double slope;  ///< finite-difference slope of the threshold position
};

/// Interface velocity across one step, both states on the same grid.
VelocityEstimate interface_velocity(const State& prev, const State& next, const ModelParams& p);

/// U(z) = 1 on z <= 0, e^{-chi z} on z > 0.
Field jump_factor(const Grid1D& grid, double chi);

/// One step of the equation satisfied by v = rho / U in the moving frame;
/// v is C^1 across the threshold.
Field factorized_v_step(const Field& v, double xdot, const ModelParams& p, const SchemeConfig& cfg);

/// rho'(0+) - rho'(0-) + chi rho(0) estimated from one-sided differences
/// around the threshold of a lab- or moving-frame state.
double jump_residual(const State& s, const ModelParams& p);

// ---------------------------------------------------------------------------
// Drivers

struct TrajectoryPoint {
    double t;
    double xbar;        ///< lab-frame threshold position
    double xdot_ode;
    double xdot_slope;
    double mass_rho;
    double dn_min;
};

struct RunOptions {
    double t_end = 1.0;
    double sample_interval = 0.1;
    std::vector<double> snapshot_times;
    std::optional<double> moving_xdot;  ///< run in a moving frame at this speed
    int startup_steps = 2;              ///< leading steps split into two backward-Euler halves
    /// When false, steps that break nutrient monotonicity are counted instead
    /// of aborting the run; the threshold must still be crossed exactly once.
    bool abort_on_monotonicity_loss = true;
};

struct RunResult {
    State final_state;
    std::vector<TrajectoryPoint> trajectory;
    std::vector<State> snapshots;
    long monotonicity_lost_steps = 0;
    double worst_margin = 0.0;  ///< smallest monotonicity_margin seen after any step
};

/// Advances the parabolic model to t_end. Throws MonotonicityLost if the
/// nutrient stops being nondecreasing, unless the options say otherwise.
RunResult run_parabolic(const State& initial, const ModelParams& p, const SchemeConfig& cfg,
                        const RunOptions& opt);

/// Grid with n_cells cells of width dz whose faces include z = 0.
Grid1D aligned_grid(double z_min, double z_max, double dz);

/// Minimal-speed wave (density and calibrated nutrient) sampled on `grid`.
State wave_initial_state(const ModelParams& p, const Grid1D& grid, bool moving_frame);

struct SpreadingInit {
    double amplitude = 1.0;
    double width = 2.0;                 ///< tanh width of the nutrient ramp
    std::optional<double> tail_rate;    ///< rho0 = min(1, e^{-rate x}) instead of the step
};

/// rho0 = amplitude on x <= 0 (zero beyond), N0 a tanh ramp through n_th at 0.
State spreading_initial_state(const ModelParams& p, const Grid1D& grid, const SpreadingInit& init = {});

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryPoint>& traj,
                          const std::vector<std::string>& header);
void write_snapshot_csv(std::ostream& out, const State& s, const std::vector<std::string>& header);

}  // namespace gog
