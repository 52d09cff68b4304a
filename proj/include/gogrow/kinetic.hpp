#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "gogrow/core.hpp"
#include "gogrow/pde.hpp"
#include "gogrow/waves.hpp"

namespace gog {

/// Right- and left-moving densities at speeds +-1/epsilon, with the nutrient.
struct KineticState {
    Field f_plus;
    Field f_minus;
    Field nutrient;
    double time = 0.0;
    double epsilon = 0.25;
    double n_left = 0.0;  ///< Dirichlet nutrient value at z_min

    static KineticState make(Field f_plus, Field f_minus, Field nutrient, double epsilon, double time = 0.0);
    Field rho() const;
    void validate() const;
};

struct MaxwellianWeights {
    double m_plus;
    double m_minus;
};

MaxwellianWeights maxwellian_weights(double n, double dn, double n_th, double eps, double chi);

struct KineticStepResult {
    KineticState state;
    int clipped = 0;  ///< cells where a slightly negative density was reset to zero
    bool monotonicity_lost = false;
};

/// One step: half reaction, transport, relaxation, half reaction; nutrient
/// diffusion alongside the transport.
/// Transport is an exact shift when dt / (eps dz) is an integer.
KineticStepResult kinetic_step(const KineticState& ks, const ModelParams& p, const SchemeConfig& cfg);

/// P(X) = a X^2 + b X + c.
struct CharPoly {
    double a;
    double b;
    double c;

    double discriminant() const { return b * b - 4.0 * a * c; }
    double operator()(double x) const { return (a * x + b) * x + c; }
    double derivative(double x) const { return 2.0 * a * x + b; }
    std::array<std::complex<double>, 2> roots() const;
};

CharPoly characteristic_polynomial(double sigma, double eps);

bool subsonic_wave_exists(double chi, double eps, double sigma);

struct KineticRunResult {
    KineticState final_state;
    std::vector<TrajectoryPoint> trajectory;
    std::vector<KineticState> snapshots;
    long monotonicity_lost_steps = 0;  ///< steps ending with a dip in N (recorded, not fatal)
    long clipped_cells = 0;
};

/// Lab-frame run. A dip in N away from the threshold is counted rather than
/// fatal; a second threshold crossing still throws.
KineticRunResult run_kinetic(const KineticState& initial, const ModelParams& p, const SchemeConfig& cfg,
                             const RunOptions& opt);

/// Minimal-speed kinetic wave on `grid`, lab frame, threshold at 0.
KineticState kinetic_wave_initial_state(const ModelParams& p, const Grid1D& grid);

/// Step density split by the local Maxwellian, tanh nutrient ramp.
KineticState kinetic_spreading_initial_state(const ModelParams& p, const Grid1D& grid,
                                             const SpreadingInit& init = {});

void write_kinetic_snapshot_csv(std::ostream& out, const KineticState& s, const std::vector<std::string>& header);

}  // namespace gog
