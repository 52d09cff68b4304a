#include "gogrow/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "gogrow/csv.hpp"

namespace gog {

namespace {

constexpr double kSpeedSnap = 1e-12;  // relative tolerance for "at the minimal speed"
constexpr double kRhoNegligible = 1e-12;

void require_positive(double x, const char* what) {
    if (!(std::isfinite(x) && x > 0.0)) throw PreconditionError(std::string(what) + " must be positive");
}

/// sinh(x)/x without cancellation near 0.
double sinhc(double x) { return std::abs(x) < 1e-8 ? 1.0 : std::sinh(x) / x; }

}  // namespace

double minimal_speed(double chi) {
    require_positive(chi, "chi");
    return chi > 1.0 ? chi + 1.0 / chi : 2.0;
}

DecayRoots decay_roots(double sigma) {
    if (!std::isfinite(sigma) || sigma < 2.0)
        throw PreconditionError("decay_roots: sigma < 2 gives complex roots");
    const double mu_plus = 0.5 * (sigma + std::sqrt(sigma * sigma - 4.0));
    return {1.0 / mu_plus, mu_plus};
}

std::string to_string(WaveRegime r) {
    switch (r) {
        case WaveRegime::Supercritical: return "supercritical";
        case WaveRegime::CriticalLargeBias: return "critical_large_bias";
        case WaveRegime::CriticalKPP: return "critical_kpp";
        case WaveRegime::CriticalKPPBoundary: return "critical_kpp_boundary";
    }
    return "unknown";
}

WaveProfile parabolic_profile(double chi, double sigma, double a_left) {
    require_positive(a_left, "a_left");
    if (!std::isfinite(sigma)) throw PreconditionError("sigma must be finite");
    const double s_min = minimal_speed(chi);
    if (sigma < 2.0 - kSpeedSnap * 2.0) throw PreconditionError("sigma < 2 gives complex decay roots");
    if (sigma < s_min * (1.0 - kSpeedSnap))
        throw PreconditionError("sigma below minimal speed: profile would change sign");

    WaveProfile wp;
    wp.chi_ = chi;
    wp.a_left_ = a_left;
    const bool critical = sigma <= s_min * (1.0 + kSpeedSnap);
    wp.sigma_ = critical ? s_min : sigma;
    const DecayRoots r = decay_roots(wp.sigma_);
    wp.mu_minus_ = r.mu_minus;
    wp.mu_plus_ = r.mu_plus;
    if (!critical) {
        wp.regime_ = WaveRegime::Supercritical;
        const double gap = r.mu_plus - r.mu_minus;
        wp.coef_slow_ = a_left * (r.mu_plus - chi) / gap;
        wp.coef_fast_ = a_left * (chi - r.mu_minus) / gap;
    } else if (std::abs(chi - 1.0) <= 1e-12) {
        wp.regime_ = WaveRegime::CriticalKPPBoundary;
    } else if (chi > 1.0) {
        wp.regime_ = WaveRegime::CriticalLargeBias;
    } else {
        wp.regime_ = WaveRegime::CriticalKPP;
    }
    return wp;
}

WaveProfile WaveProfile::with_amplitude(double a) const {
    require_positive(a, "a_left");
    WaveProfile w = *this;
    const double s = a / a_left_;
    w.a_left_ = a;
    w.coef_slow_ *= s;
    w.coef_fast_ *= s;
    return w;
}

double WaveProfile::value(double z) const {
    if (z <= 0.0) return a_left_;
    switch (regime_) {
        case WaveRegime::Supercritical:
            return coef_slow_ * std::exp(-mu_minus_ * z) + coef_fast_ * std::exp(-mu_plus_ * z);
        case WaveRegime::CriticalLargeBias: return a_left_ * std::exp(-chi_ * z);
        case WaveRegime::CriticalKPP: return a_left_ * ((1.0 - chi_) * z + 1.0) * std::exp(-z);
        case WaveRegime::CriticalKPPBoundary: return a_left_ * std::exp(-z);
    }
    return 0.0;
}

double WaveProfile::derivative(double z) const {
    if (z < 0.0) return 0.0;
    switch (regime_) {
        case WaveRegime::Supercritical:
            return -mu_minus_ * coef_slow_ * std::exp(-mu_minus_ * z) -
                   mu_plus_ * coef_fast_ * std::exp(-mu_plus_ * z);
        case WaveRegime::CriticalLargeBias: return -chi_ * a_left_ * std::exp(-chi_ * z);
        case WaveRegime::CriticalKPP:
            return -a_left_ * (chi_ + (1.0 - chi_) * z) * std::exp(-z);
        case WaveRegime::CriticalKPPBoundary: return -a_left_ * std::exp(-z);
    }
    return 0.0;
}

double WaveProfile::log_derivative(double z) const {
    if (z < 0.0) return 0.0;
    switch (regime_) {
        case WaveRegime::Supercritical: {
            const double r = std::exp(-(mu_plus_ - mu_minus_) * z);
            return -(mu_minus_ * coef_slow_ + mu_plus_ * coef_fast_ * r) / (coef_slow_ + coef_fast_ * r);
        }
        case WaveRegime::CriticalLargeBias: return -chi_;
        case WaveRegime::CriticalKPP: return -(chi_ + (1.0 - chi_) * z) / ((1.0 - chi_) * z + 1.0);
        case WaveRegime::CriticalKPPBoundary: return -1.0;
    }
    return 0.0;
}

double WaveProfile::log_ratio(double z) const {
    if (z <= 0.0) return 0.0;
    switch (regime_) {
        case WaveRegime::Supercritical: {
            const double r = std::exp(-(mu_plus_ - mu_minus_) * z);
            return -mu_minus_ * z + std::log((coef_slow_ + coef_fast_ * r) / a_left_);
        }
        case WaveRegime::CriticalLargeBias: return -chi_ * z;
        case WaveRegime::CriticalKPP: return std::log((1.0 - chi_) * z + 1.0) - z;
        case WaveRegime::CriticalKPPBoundary: return -z;
    }
    return 0.0;
}

double WaveProfile::right_integral() const {
    switch (regime_) {
        case WaveRegime::Supercritical: return coef_slow_ / mu_minus_ + coef_fast_ / mu_plus_;
        case WaveRegime::CriticalLargeBias: return a_left_ / chi_;
        case WaveRegime::CriticalKPP: return a_left_ * (2.0 - chi_);
        case WaveRegime::CriticalKPPBoundary: return a_left_;
    }
    return 0.0;
}

Field sample_profile(const WaveProfile& wp, const Grid1D& grid) {
    return Field::from_function(grid, [&](double z) { return wp.value(z); });
}

// ---------------------------------------------------------------------------
// Nutrient profile

namespace {

struct Shot {
    double n_tilde_inf = 0.0;
    std::vector<double> samples;  // unnormalised values at the requested z > 0
};

/// Unnormalised nutrient for plateau `a`: exact exponential on z <= 0,
/// RK4 on z > 0 until rho is negligible, then the exact tail limit.
Shot shoot(const std::function<double(double)>& rho_unit, double a, double sigma, double D, double h,
           const std::vector<double>& targets) {
    const double lam = (-sigma + std::sqrt(sigma * sigma + 4.0 * D * a)) / (2.0 * D);
    double z = 0.0;
    double y0 = 1.0, y1 = lam;
    auto rhs = [&](double zz, double n, double dn, double& dn_out, double& ddn_out) {
        dn_out = dn;
        ddn_out = (-sigma * dn + a * rho_unit(zz) * n) / D;
    };
    auto rk4 = [&](double step) {
        double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        rhs(z, y0, y1, k1a, k1b);
        rhs(z + 0.5 * step, y0 + 0.5 * step * k1a, y1 + 0.5 * step * k1b, k2a, k2b);
        rhs(z + 0.5 * step, y0 + 0.5 * step * k2a, y1 + 0.5 * step * k2b, k3a, k3b);
        rhs(z + step, y0 + step * k3a, y1 + step * k3b, k4a, k4b);
        y0 += step / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
        y1 += step / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
        z += step;
    };
    Shot shot;
    shot.samples.reserve(targets.size());
    for (double t : targets) {
        if (t > z) {
            const int n = std::max(1, static_cast<int>(std::ceil((t - z) / h - 1e-9)));
            const double step = (t - z) / n;
            for (int k = 0; k < n; ++k) rk4(step);
            z = t;
        }
        shot.samples.push_back(y0);
    }
    const double z_cap = z + 1e5;
    while (a * rho_unit(z) >= kRhoNegligible) {
        if (z > z_cap) throw NumericalError("nutrient profile: density never becomes negligible");
        rk4(h);
    }
    shot.n_tilde_inf = y0 + D / sigma * y1;
    return shot;
}

}  // namespace

NutrientProfile solve_nutrient_profile_for(const std::function<double(double)>& rho_unit, double sigma,
                                           double D, double n_th, const Grid1D& grid) {
    require_positive(sigma, "sigma");
    require_positive(D, "diffusion_n");
    if (!(n_th > 0.0 && n_th < 1.0)) throw PreconditionError("n_threshold must lie in (0, 1)");
    const double h = grid.dz() / 4.0;
    const std::vector<double> none;
    auto n_at_zero = [&](double a) { return 1.0 / shoot(rho_unit, a, sigma, D, h, none).n_tilde_inf; };

    double lo = 0.0, hi = 1.0;
    double f_lo = n_at_zero(lo), f_hi = n_at_zero(hi);
    for (int k = 0; k < 80 && f_hi > n_th; ++k) {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = n_at_zero(hi);
    }
    if (!(f_lo > n_th && f_hi <= n_th)) {
        std::ostringstream msg;
        msg << "nutrient profile: no bracket for N(0) = " << n_th << " (N(0) = " << f_lo << " at a = " << lo
            << ", " << f_hi << " at a = " << hi << ")";
        throw NumericalError(msg.str());
    }
    double a = hi, f = f_hi;
    for (int it = 0; it < 200; ++it) {
        a = 0.5 * (lo + hi);
        f = n_at_zero(a);
        if (std::abs(f - n_th) <= 1e-13 || hi - lo <= 1e-15 * hi) break;
        (f > n_th ? lo : hi) = a;
    }
    if (std::abs(f - n_th) > 1e-8) {
        std::ostringstream msg;
        msg << "nutrient profile: bisection stalled at N(0) = " << f;
        throw NumericalError(msg.str());
    }

    // Final pass with samples at the positive centres.
    const int n = grid.n_cells();
    std::vector<double> positive;
    for (int i = 0; i < n; ++i)
        if (grid.center(i) > 0.0) positive.push_back(grid.center(i));
    const Shot shot = shoot(rho_unit, a, sigma, D, h, positive);
    const double lam = (-sigma + std::sqrt(sigma * sigma + 4.0 * D * a)) / (2.0 * D);
    std::vector<double> v(static_cast<std::size_t>(n));
    std::size_t k = 0;
    for (int i = 0; i < n; ++i) {
        const double z = grid.center(i);
        const double raw = z > 0.0 ? shot.samples[k++] : std::exp(lam * z);
        v[static_cast<std::size_t>(i)] = std::min(1.0, raw / shot.n_tilde_inf);
    }
    for (int i = 0; i + 1 < n; ++i) {
        if ((v[static_cast<std::size_t>(i + 1)] - v[static_cast<std::size_t>(i)]) / grid.dz() < -1e-10) {
            std::ostringstream msg;
            msg << "nutrient profile not monotone near z = " << grid.center(i) << " (grid too short?)";
            throw NumericalError(msg.str());
        }
    }
    return NutrientProfile{Field(grid, std::move(v)), a, sigma, D, 1.0 / shot.n_tilde_inf};
}

NutrientProfile solve_nutrient_profile(const WaveProfile& wp, double D, double n_th, const Grid1D& grid) {
    const WaveProfile unit = wp.with_amplitude(1.0);
    return solve_nutrient_profile_for([unit](double z) { return unit.value(z); }, wp.sigma(), D, n_th,
                                      grid);
}

TailFit nutrient_tail_fit(const NutrientProfile& np, double sigma, double D, double mu) {
    require_positive(mu, "mu");
    require_positive(sigma, "sigma");
    require_positive(D, "D");
    if (std::abs(mu - sigma / D) <= 1e-12 * mu) throw PreconditionError("mu must differ from sigma/D");
    const Field& f = np.samples;
    const Grid1D& g = f.grid();
    double c = 0.0;
    std::vector<double> zs, logs;
    for (int i = 0; i < f.size(); ++i) {
        const double z = g.center(i);
        if (z < 0.0) continue;
        const double dev = std::abs(f[i] - 1.0);
        c = std::max(c, dev / (std::exp(-sigma * z / D) + std::exp(-mu * z)));
        if (dev > 1e-11) {
            zs.push_back(z);
            logs.push_back(std::log(dev));
        }
    }
    bool ok = std::isfinite(c);
    // slope of the log envelope over the far half of the resolved tail
    if (zs.size() >= 4) {
        const std::size_t start = zs.size() / 2;
        double sz = 0, sl = 0, szz = 0, szl = 0;
        const double m = static_cast<double>(zs.size() - start);
        for (std::size_t i = start; i < zs.size(); ++i) {
            sz += zs[i];
            sl += logs[i];
            szz += zs[i] * zs[i];
            szl += zs[i] * logs[i];
        }
        const double slope = (m * szl - sz * sl) / (m * szz - sz * sz);
        ok = ok && slope <= -0.9 * std::min(sigma / D, mu);
    }
    return {c, ok};
}

// ---------------------------------------------------------------------------
// Two-velocity model

namespace {

void check_parabolic_regime(double chi, double epsilon) {
    require_positive(chi, "chi");
    require_positive(epsilon, "epsilon");
    if (epsilon >= 1.0) throw PreconditionError("hyperbolic regime (epsilon >= 1): no subsonic wave");
    if (epsilon * chi >= 1.0) throw PreconditionError("chi must be below 1/epsilon");
}

}  // namespace

double kinetic_minimal_speed(double chi, double epsilon) {
    check_parabolic_regime(chi, epsilon);
    const double e2 = epsilon * epsilon;
    return chi > 1.0 ? (chi + 1.0 / chi) / (1.0 + e2) : 2.0 / (1.0 + e2);
}

DecayRoots kinetic_decay_roots(double sigma, double epsilon) {
    require_positive(epsilon, "epsilon");
    if (epsilon >= 1.0) throw PreconditionError("hyperbolic regime (epsilon >= 1)");
    if (!(sigma < 1.0 / epsilon)) throw PreconditionError("supersonic or sonic speed");
    const double e2 = epsilon * epsilon;
    const double s_kpp = 2.0 / (1.0 + e2);
    if (!(sigma >= s_kpp * (1.0 - kSpeedSnap)))
        throw PreconditionError("sigma below the kinetic F/KPP speed gives complex roots");
    const double disc = std::max(0.0, sigma * sigma * (1.0 + e2) * (1.0 + e2) - 4.0);
    const double scale = 1.0 - e2 * sigma * sigma;
    const double mu_plus = (sigma * (1.0 - e2) + std::sqrt(disc)) / (2.0 * scale);
    // product of the roots is 1 / (1 - eps^2 sigma^2)
    return {1.0 / (scale * mu_plus), mu_plus};
}

KineticWaveProfile kinetic_profile(double chi, double epsilon, double sigma, double a) {
    check_parabolic_regime(chi, epsilon);
    require_positive(a, "a");
    const double s_min = kinetic_minimal_speed(chi, epsilon);
    if (!(sigma < 1.0 / epsilon)) throw PreconditionError("supersonic or sonic speed");
    if (sigma < s_min * (1.0 - kSpeedSnap))
        throw PreconditionError("sigma below kinetic minimal speed: negative component");
    KineticWaveProfile kp;
    kp.chi_ = chi;
    kp.epsilon_ = epsilon;
    kp.a_ = a;
    kp.sigma_ = sigma <= s_min * (1.0 + kSpeedSnap) ? s_min : sigma;
    const double s = kp.sigma_;
    kp.roots_ = kinetic_decay_roots(s, epsilon);
    const double g = kp.roots_.mu_plus * (s - chi) - 1.0;
    if (g < -1e-10) throw PreconditionError("positivity criterion fails: negative component");
    const double e = 1.0 / epsilon;
    const double e2 = e * e;
    kp.mat_ = {{{-0.5 * (e2 - 1.0) / (e - s), 0.5 * (e2 + 1.0) / (e - s)},
                {-0.5 * (e2 + 1.0) / (e + s), 0.5 * (e2 - 1.0) / (e + s)}}};
    kp.double_root_ = kp.roots_.mu_plus - kp.roots_.mu_minus <= 1e-12 * kp.roots_.mu_plus;
    if (!kp.double_root_) {
        // spectral projection onto the slow mode; at the large-bias minimal
        // speed it vanishes and is snapped to zero so the tail stays positive
        const double gap = kp.roots_.mu_plus - kp.roots_.mu_minus;
        const double u0 = 1.0 + epsilon * chi, u1 = 1.0 - epsilon * chi;
        kp.slow_ = {((kp.mat_[0][0] + kp.roots_.mu_plus) * u0 + kp.mat_[0][1] * u1) / gap,
                    (kp.mat_[1][0] * u0 + (kp.mat_[1][1] + kp.roots_.mu_plus) * u1) / gap};
        if (std::abs(kp.slow_[0]) + std::abs(kp.slow_[1]) <= 1e-9 * (u0 + u1)) kp.slow_ = {0.0, 0.0};
    }
    return kp;
}

KineticWaveProfile KineticWaveProfile::with_amplitude(double a) const {
    require_positive(a, "a");
    KineticWaveProfile k = *this;
    k.a_ = a;
    return k;
}

std::array<double, 2> KineticWaveProfile::left_state() const {
    return {a_ * (1.0 + epsilon_ * chi_), a_ * (1.0 - epsilon_ * chi_)};
}

std::array<double, 2> KineticWaveProfile::value(double z) const {
    const auto f0 = left_state();
    if (z <= 0.0) return f0;
    // exp(Az) = e^{mz} [cosh(dz) I + sinh(dz)/d (A - mI)], m = -(mu+ + mu-)/2, d = (mu+ - mu-)/2
    const double m = -0.5 * (roots_.mu_plus + roots_.mu_minus);
    const double d = 0.5 * (roots_.mu_plus - roots_.mu_minus);
    const double slow = std::exp(-roots_.mu_minus * z);
    const double fast = std::exp(-roots_.mu_plus * z);
    if (d * z >= 1.0) {
        const double s0 = a_ * slow_[0], s1 = a_ * slow_[1];
        return {s0 * slow + (f0[0] - s0) * fast, s1 * slow + (f0[1] - s1) * fast};
    }
    const double c_part = 0.5 * (slow + fast);
    const double s_part = d * z < 1.0 ? std::exp(m * z) * z * sinhc(d * z) : (slow - fast) / (2.0 * d);
    const double w0 = (mat_[0][0] - m) * f0[0] + mat_[0][1] * f0[1];
    const double w1 = mat_[1][0] * f0[0] + (mat_[1][1] - m) * f0[1];
    return {c_part * f0[0] + s_part * w0, c_part * f0[1] + s_part * w1};
}

double KineticWaveProfile::rho(double z) const {
    const auto f = value(z);
    return 0.5 * (f[0] + f[1]);
}

NutrientProfile solve_kinetic_nutrient_profile(const KineticWaveProfile& kp, double D, double n_th,
                                               const Grid1D& grid) {
    const KineticWaveProfile unit = kp.with_amplitude(1.0);
    return solve_nutrient_profile_for([unit](double z) { return unit.rho(z); }, kp.sigma(), D, n_th, grid);
}

// ---------------------------------------------------------------------------
// Export

void write_profile_csv(std::ostream& out, const WaveProfile& wp, const NutrientProfile& np,
                       const ModelParams& p) {
    CsvTable t({"z", "rho", "n"});
    t.comment(std::string("gogrow ") + kVersion + " parabolic wave profile");
    t.comment("sigma=" + format_real(wp.sigma()) + " chi=" + format_real(wp.chi()) +
              " D=" + format_real(p.diffusion_n) + " n_th=" + format_real(p.n_threshold) +
              " epsilon=" + format_real(p.epsilon) + " a_left=" + format_real(wp.a_left()) +
              " regime=" + to_string(wp.regime()));
    const Grid1D& g = np.samples.grid();
    for (int i = 0; i < g.n_cells(); ++i) t.add_row({g.center(i), wp.value(g.center(i)), np.samples[i]});
    t.write(out);
}

void write_kinetic_profile_csv(std::ostream& out, const KineticWaveProfile& kp, const NutrientProfile& np,
                               const ModelParams& p) {
    CsvTable t({"z", "rho", "n", "f_plus", "f_minus"});
    t.comment(std::string("gogrow ") + kVersion + " kinetic wave profile");
    t.comment("sigma=" + format_real(kp.sigma()) + " chi=" + format_real(kp.chi()) +
              " D=" + format_real(p.diffusion_n) + " n_th=" + format_real(p.n_threshold) +
              " epsilon=" + format_real(kp.epsilon()) + " a=" + format_real(kp.a()));
    const Grid1D& g = np.samples.grid();
    for (int i = 0; i < g.n_cells(); ++i) {
        const double z = g.center(i);
        const auto f = kp.value(z);
        t.add_row({z, 0.5 * (f[0] + f[1]), np.samples[i], f[0], f[1]});
    }
    t.write(out);
}

}  // namespace gog
