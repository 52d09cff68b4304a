#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gogrow/core.hpp"
#include "gogrow/linalg.hpp"
#include "gogrow/pde.hpp"
#include "gogrow/waves.hpp"

namespace gog {

/// Drift of the neutral-fraction equation nu_t = nu_zz + beta nu_z for a
/// given wave, with beta = sigma - chi 1_{z<=0} + 2 rho'/rho and its
/// potential V (V' = beta, V(0) = 0).
class DriftSpec {
public:
    explicit DriftSpec(WaveProfile wp);

    const WaveProfile& profile() const { return wp_; }
    double sigma() const { return wp_.sigma(); }
    double chi() const { return wp_.chi(); }

    double beta(double z) const;
    double beta_left() const { return sigma() - chi(); }
    double beta_right() const { return beta_right_zero_; }
    /// Derivative of beta away from z = 0.
    double beta_prime(double z) const;
    double v_weight(double z) const;
    /// e^V integrable over the line (the large-bias minimal-speed wave only).
    bool weight_integrable() const;

private:
    WaveProfile wp_;
    double beta_right_zero_;
};

DriftSpec build_drift(const WaveProfile& wp);

struct FractionState {
    Field nu;
    double time;
    DriftSpec drift;
};

/// One fully implicit step of the conservative weighted form
/// e^V nu_t = (e^V nu_z)_z with e^V sampled at centres and faces.
/// Zero flux at both ends; cfg.theta is not used.
FractionState neutral_step(const FractionState& fs, const SchemeConfig& cfg);

/// e^{V - max V} at the centres of `grid`.
Field weight_field(const DriftSpec& drift, const Grid1D& grid);

/// Weighted average of nu0 with weight e^V; needs an integrable weight.
double weighted_mean(const Field& nu0, const DriftSpec& drift);

/// sqrt of the e^V-weighted integral of (nu - c)^2.
double weighted_distance(const Field& nu, double c, const DriftSpec& drift);

double spectral_gap(double chi, double sigma);

struct GapReport {
    double gamma_formula = 0.0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double mean_weight = 0.0;      ///< weighted mean of the initial fraction, when known
    std::vector<double> eigenvalues;
    double ground_cosine = 0.0;    ///< cosine between the ground state and e^{V/2}
    double boundary_mass = 0.0;    ///< squared ground-state mass in the end cells
};

/// Symmetric tridiagonal discretisation of -f'' + (beta^2/4 + beta'/2) f on
/// `grid` with zero Dirichlet data, the kink of beta entering as a point mass.
SymTridiag pullback_operator(const DriftSpec& drift, const Grid1D& grid);

GapReport discrete_spectrum(const DriftSpec& drift, const Grid1D& grid, int k);

enum class DecayKind { Pushed, Pulled, Inconclusive };
std::string to_string(DecayKind k);

struct Classification {
    DecayKind kind;
    double rate;  ///< fitted exponential rate (positive means decay)
};

struct DecaySample {
    double t;
    double metric;
    double bound;
};

Classification classify(const std::vector<DecaySample>& series, const DriftSpec& drift);

/// Evolves nu0 and records the weighted distance to its weighted mean, with
/// the bound e^{-gamma t} times the initial distance.
std::vector<DecaySample> pushed_decay_series(const Field& nu0, const DriftSpec& drift, double dt, double t_end,
                                             double sample_interval);

/// Evolves nu0 and records sup |nu| over [a, z_max - 10].
std::vector<DecaySample> pulled_sup_series(const Field& nu0, const DriftSpec& drift, double dt, double t_end,
                                           double sample_interval, double a = -10.0);

void write_decay_csv(std::ostream& out, const std::vector<DecaySample>& series,
                     const std::vector<std::string>& header);
void write_eigen_csv(std::ostream& out, const GapReport& report, const std::vector<std::string>& header);

}  // namespace gog
