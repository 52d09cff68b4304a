#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string>

#include "gogrow/core.hpp"

namespace gog {

/// Minimal travelling-wave speed of the parabolic model.
double minimal_speed(double chi);

struct DecayRoots {
    double mu_minus;
    double mu_plus;
};

/// Roots of X^2 - sigma X + 1, the right-side decay rates.
DecayRoots decay_roots(double sigma);

enum class WaveRegime {
    Supercritical,        ///< sigma above the minimal speed: two exponentials
    CriticalLargeBias,    ///< chi > 1 at the minimal speed: single exponential e^{-chi z}
    CriticalKPP,          ///< chi < 1 at speed 2: ((1-chi) z + 1) e^{-z}
    CriticalKPPBoundary,  ///< chi = 1 at speed 2: e^{-z}
};

std::string to_string(WaveRegime r);

/// Closed-form parabolic wave: rho = a_left on z <= 0, a combination of
/// decaying exponentials on z > 0. Evaluable anywhere.
class WaveProfile {
public:
    double sigma() const { return sigma_; }
    double chi() const { return chi_; }
    double a_left() const { return a_left_; }
    double mu_minus() const { return mu_minus_; }
    double mu_plus() const { return mu_plus_; }
    WaveRegime regime() const { return regime_; }
    /// Coefficients of e^{-mu_minus z} and e^{-mu_plus z} (supercritical only).
    double coef_slow() const { return coef_slow_; }
    double coef_fast() const { return coef_fast_; }

    double value(double z) const;
    double operator()(double z) const { return value(z); }
    /// Derivative; at z = 0 the right-sided value is returned.
    double derivative(double z) const;
    double left_derivative_at_zero() const { return 0.0; }
    double right_derivative_at_zero() const { return derivative(0.0); }
    /// rho'/rho on z > 0, computed without underflow.
    double log_derivative(double z) const;
    /// ln(rho(z)/rho(0)) on z >= 0, computed without underflow.
    double log_ratio(double z) const;
    /// Exact integral of rho over (0, inf).
    double right_integral() const;

    WaveProfile with_amplitude(double a_left) const;

private:
    friend WaveProfile parabolic_profile(double chi, double sigma, double a_left);
    double sigma_ = 0, chi_ = 0, a_left_ = 0, mu_minus_ = 0, mu_plus_ = 0;
    WaveRegime regime_ = WaveRegime::Supercritical;
    double coef_slow_ = 0, coef_fast_ = 0;
};

WaveProfile parabolic_profile(double chi, double sigma, double a_left);

/// Nutrient profile of a wave, calibrated so that N(0) = n_th.
struct NutrientProfile {
    Field samples;
    double a_left_calibrated;
    double sigma;
    double diffusion;
    double n_at_zero;  ///< achieved N(0)
};

/// Solves -sigma N' - D N'' = -rho N with N -> 1 at +inf and N -> 0 at -inf,
/// bisecting on the plateau level so that N(0) = n_th. `rho_unit` is the
/// right-side density for unit plateau.
NutrientProfile solve_nutrient_profile_for(const std::function<double(double)>& rho_unit,
                                           double sigma, double D, double n_th, const Grid1D& grid);

NutrientProfile solve_nutrient_profile(const WaveProfile& wp, double D, double n_th, const Grid1D& grid);

struct TailFit {
    double c_fit;
    bool ok;
};

/// Smallest C with |N - 1| <= C (e^{-sigma z / D} + e^{-mu z}) on sampled z >= 0.
TailFit nutrient_tail_fit(const NutrientProfile& np, double sigma, double D, double mu);

double kinetic_minimal_speed(double chi, double epsilon);

/// Right-side decay rates of the two-velocity wave.
DecayRoots kinetic_decay_roots(double sigma, double epsilon);

/// Two-velocity wave: (f+, f-) = a (1+eps chi, 1-eps chi) on z <= 0 and
/// exp(A z) applied to that vector on z > 0.
class KineticWaveProfile {
public:
    double sigma() const { return sigma_; }
    double chi() const { return chi_; }
    double epsilon() const { return epsilon_; }
    double a() const { return a_; }
    DecayRoots roots() const { return roots_; }
    bool double_root() const { return double_root_; }
    const std::array<std::array<double, 2>, 2>& right_matrix() const { return mat_; }

    std::array<double, 2> left_state() const;
    /// (f+, f-) at z.
    std::array<double, 2> value(double z) const;
    double f_plus(double z) const { return value(z)[0]; }
    double f_minus(double z) const { return value(z)[1]; }
    double rho(double z) const;

    KineticWaveProfile with_amplitude(double a) const;

private:
    friend KineticWaveProfile kinetic_profile(double chi, double epsilon, double sigma, double a);
    double sigma_ = 0, chi_ = 0, epsilon_ = 0, a_ = 0;
    DecayRoots roots_{0, 0};
    bool double_root_ = false;
    std::array<std::array<double, 2>, 2> mat_{};
    std::array<double, 2> slow_{};  ///< e^{-mu_minus z} component of the unit-amplitude state
};

KineticWaveProfile kinetic_profile(double chi, double epsilon, double sigma, double a);

NutrientProfile solve_kinetic_nutrient_profile(const KineticWaveProfile& kp, double D, double n_th,
                                               const Grid1D& grid);

/// Samples a profile at the centres of `grid`.
Field sample_profile(const WaveProfile& wp, const Grid1D& grid);

/// CSV with columns z, rho, n. Header comment lines echo the parameters.
void write_profile_csv(std::ostream& out, const WaveProfile& wp, const NutrientProfile& np,
                       const ModelParams& p);
/// CSV with columns z, rho, n, f_plus, f_minus.
void write_kinetic_profile_csv(std::ostream& out, const KineticWaveProfile& kp,
                               const NutrientProfile& np, const ModelParams& p);

}  // namespace gog
