#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "gogrow/kinetic.hpp"
#include "gogrow/waves.hpp"

using namespace gog;

namespace {

// Plateau level of the chi = 2, D = 1, N_th = 0.5 minimal-speed wave on
// [-50, 150] with 4000 cells; frozen from a run and reproduced at 8000 cells
// to within 1e-9.
constexpr double kGoldenPlateau = 2.5601699822473165;

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace

TEST(MinimalSpeed, Branches) {
    EXPECT_DOUBLE_EQ(minimal_speed(2.0), 2.5);
    EXPECT_DOUBLE_EQ(minimal_speed(0.5), 2.0);
    EXPECT_DOUBLE_EQ(minimal_speed(1.0), 2.0);
    EXPECT_NEAR(minimal_speed(1.0 + 1e-9), 2.0, 1e-12);
    EXPECT_THROW(minimal_speed(0.0), PreconditionError);
    EXPECT_THROW(minimal_speed(-1.0), PreconditionError);
}

TEST(DecayRoots, Examples) {
    const auto r2 = decay_roots(2.0);
    EXPECT_DOUBLE_EQ(r2.mu_minus, 1.0);
    EXPECT_DOUBLE_EQ(r2.mu_plus, 1.0);
    const auto r = decay_roots(2.5);
    EXPECT_NEAR(r.mu_plus, 2.0, 1e-14);
    EXPECT_NEAR(r.mu_minus, 0.5, 1e-14);
    EXPECT_THROW(decay_roots(1.999), PreconditionError);
}

TEST(DecayRoots, VietaAndMonotoneOnLadder) {
    double prev_minus = 2.0, prev_plus = 0.0;
    for (double sigma = 2.0; sigma <= 10.0; sigma += 0.05) {
        const auto r = decay_roots(sigma);
        EXPECT_NEAR(r.mu_minus * r.mu_plus, 1.0, 1e-12);
        EXPECT_NEAR(r.mu_minus + r.mu_plus, sigma, 1e-12);
        EXPECT_GT(r.mu_minus, 0.0);
        EXPECT_LE(r.mu_minus, 1.0);
        EXPECT_GE(r.mu_plus, 1.0);
        if (sigma > 2.0) {
            EXPECT_LT(r.mu_minus, prev_minus);
            EXPECT_GT(r.mu_plus, prev_plus);
        }
        prev_minus = r.mu_minus;
        prev_plus = r.mu_plus;
    }
}

TEST(ParabolicProfile, SlowModeOnlyWhenChiIsSlowRoot) {
    const WaveProfile wp = parabolic_profile(0.5, 2.5, 1.0);
    EXPECT_EQ(wp.regime(), WaveRegime::Supercritical);
    for (double z : {0.1, 1.0, 5.0, 20.0}) EXPECT_NEAR(wp(z), std::exp(-0.5 * z), 1e-13);
}

TEST(ParabolicProfile, CriticalKpp) {
    const WaveProfile wp = parabolic_profile(0.5, 2.0, 1.0);
    EXPECT_EQ(wp.regime(), WaveRegime::CriticalKPP);
    for (double z : {0.1, 1.0, 5.0, 20.0}) EXPECT_NEAR(wp(z), (0.5 * z + 1.0) * std::exp(-z), 1e-13);
    EXPECT_EQ(parabolic_profile(1.0, 2.0, 1.0).regime(), WaveRegime::CriticalKPPBoundary);
}

TEST(ParabolicProfile, CriticalLargeBias) {
    const WaveProfile wp = parabolic_profile(2.0, 2.5, 1.0);
    EXPECT_EQ(wp.regime(), WaveRegime::CriticalLargeBias);
    for (double z : {0.1, 1.0, 5.0}) EXPECT_NEAR(wp(z), std::exp(-2.0 * z), 1e-13);
    for (double z : {-10.0, -1.0, 0.0}) EXPECT_DOUBLE_EQ(wp(z), 1.0);
}

TEST(ParabolicProfile, RejectsSubminimalSpeed) {
    for (double chi : {0.3, 1.0, 1.7, 2.0, 4.0})
        EXPECT_THROW(parabolic_profile(chi, minimal_speed(chi) - 1e-6, 1.0), PreconditionError);
    EXPECT_THROW(parabolic_profile(2.0, 2.5, 0.0), PreconditionError);
}

TEST(ParabolicProfile, JumpNonnegativityAndIntegralIdentity) {
    for (double chi : {0.2, 0.5, 1.0, 1.3, 2.0, 3.0}) {
        const double smin = minimal_speed(chi);
        for (double sigma : {smin, smin + 0.1, smin + 1.0, smin + 3.0}) {
            const double a = 1.7;
            const WaveProfile wp = parabolic_profile(chi, sigma, a);
            // jump of the derivative across z = 0
            EXPECT_NEAR(wp.right_derivative_at_zero() - wp.left_derivative_at_zero(), -chi * wp(0.0),
                        1e-12 * a * (1 + chi));
            EXPECT_NEAR(wp(1e-12), wp(0.0), 1e-10);
            for (double z = -5.0; z <= 60.0; z += 0.25) EXPECT_GE(wp(z), 0.0);
            const double quad = trapezoid([&](double z) { return wp(z); }, 0.0, 200.0, 400000);
            EXPECT_NEAR((sigma - chi) * a, quad, 1e-6);
            EXPECT_NEAR(wp.right_integral(), quad, 1e-6);
        }
    }
}

TEST(NutrientProfile, ZeroDensityGivesUnitNutrient) {
    const Grid1D g = build_grid(-20.0, 40.0, 600);
    const NutrientProfile np = solve_nutrient_profile_for([](double) { return 0.0; }, 2.5, 1.0, 0.999999, g);
    EXPECT_NEAR(np.samples.interpolate(0.0), 0.999999, 1e-6);
    // a vanishing density is approached as the plateau goes to zero
    EXPECT_LT(np.a_left_calibrated, 1e-3);
}

TEST(NutrientProfile, GoldenPlateauAtTwoResolutions) {
    const WaveProfile wp = parabolic_profile(2.0, 2.5, 1.0);
    const NutrientProfile coarse = solve_nutrient_profile(wp, 1.0, 0.5, build_grid(-50.0, 150.0, 4000));
    const NutrientProfile fine = solve_nutrient_profile(wp, 1.0, 0.5, build_grid(-50.0, 150.0, 8000));
    EXPECT_NEAR(coarse.n_at_zero, 0.5, 1e-8);
    EXPECT_NEAR(fine.n_at_zero, 0.5, 1e-8);
    EXPECT_NEAR(coarse.a_left_calibrated, kGoldenPlateau, 1e-12);
    EXPECT_NEAR(fine.a_left_calibrated, kGoldenPlateau, 1e-8);
}

TEST(NutrientProfile, MonotoneAndSolvesOdeIndependently) {
    const WaveProfile wp = parabolic_profile(2.0, 2.5, 1.0);
    const Grid1D g = build_grid(-50.0, 150.0, 4000);
    const NutrientProfile np = solve_nutrient_profile(wp, 1.0, 0.5, g);
    for (int i = 0; i + 1 < np.samples.size(); ++i)
        EXPECT_GE((np.samples[i + 1] - np.samples[i]) / g.dz(), -1e-10);

    // Oracle: on z < 0 the nutrient is n_th e^{lambda z}; shoot forward from
    // z = 0 with that slope and check the far-right level is one.
    const double a = np.a_left_calibrated, sigma = 2.5, d = 1.0, nth = 0.5;
    const double lambda = (-sigma + std::sqrt(sigma * sigma + 4.0 * a * d)) / (2.0 * d);
    std::array<double, 2> y{nth, lambda * nth};
    auto rhs = [&](double z, const std::array<double, 2>& u) {
        return std::array<double, 2>{u[1], (a * std::exp(-2.0 * z) * u[0] - sigma * u[1]) / d};
    };
    const double h = 1e-3;
    for (int k = 1; k <= 30000; ++k) {
        const double z = (k - 1) * h;
        const auto k1 = rhs(z, y);
        const auto k2 = rhs(z + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
        const auto k3 = rhs(z + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
        const auto k4 = rhs(z + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) y[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        // cell centres sit at odd multiples of dz / 2 = 0.025
        if (k % 2000 == 25) EXPECT_NEAR(np.samples.interpolate(k * h), y[0], 1e-7) << "z = " << k * h;
    }
    EXPECT_NEAR(y[0], 1.0, 1e-6);
    for (double zl : {-1.025, -3.025, -6.025})
        EXPECT_NEAR(np.samples.interpolate(zl), nth * std::exp(lambda * zl), 1e-7);
}

TEST(NutrientTailFit, Examples) {
    const Grid1D g = build_grid(-50.0, 150.0, 4000);
    const NutrientProfile np = solve_nutrient_profile(parabolic_profile(2.0, 2.5, 1.0), 1.0, 0.5, g);
    const TailFit fit = nutrient_tail_fit(np, 2.5, 1.0, decay_roots(2.5).mu_minus);
    EXPECT_TRUE(fit.ok);
    EXPECT_TRUE(std::isfinite(fit.c_fit));
    EXPECT_GT(fit.c_fit, 0.0);
    EXPECT_THROW(nutrient_tail_fit(np, 2.5, 1.0, 2.5), PreconditionError);

    NutrientProfile one = np;
    one.samples = Field::constant(g, 1.0);
    EXPECT_EQ(nutrient_tail_fit(one, 2.5, 1.0, 0.5).c_fit, 0.0);
}

TEST(KineticSpeed, Examples) {
    // chi = 1/eps itself is outside the subsonic regime; the formula tends to 2
    EXPECT_NEAR(kinetic_minimal_speed(2.0, 0.5 - 1e-12), 2.0, 1e-10);
    EXPECT_THROW(kinetic_minimal_speed(2.0, 0.5), PreconditionError);
    EXPECT_NEAR(kinetic_minimal_speed(0.5, 0.1), 2.0 / 1.01, 1e-14);
    for (double chi : {0.5, 1.0, 2.0, 3.0})
        EXPECT_NEAR(kinetic_minimal_speed(chi, 1e-5), minimal_speed(chi), 1e-8);
    EXPECT_THROW(kinetic_minimal_speed(0.5, 1.0), PreconditionError);
    EXPECT_THROW(kinetic_minimal_speed(0.5, 1.5), PreconditionError);
    EXPECT_THROW(kinetic_minimal_speed(2.0, 0.5 + 1e-9), PreconditionError);
    for (double chi : {0.5, 1.5, 2.0, 3.0})
        for (double eps : {0.05, 0.2, 0.3})
            if (eps * chi < 1.0) EXPECT_LT(kinetic_minimal_speed(chi, eps), 1.0 / eps);
}

TEST(KineticRoots, DoubleRootAtKppSpeed) {
    const auto r = kinetic_decay_roots(1.6, 0.5);
    EXPECT_NEAR(r.mu_minus, 5.0 / 3.0, 1e-6);
    EXPECT_NEAR(r.mu_plus, 5.0 / 3.0, 1e-6);
}

TEST(KineticRoots, FastRootAtMinimalSpeed) {
    const double sigma = kinetic_minimal_speed(2.0, 0.4);
    EXPECT_NEAR(sigma, 2.5 / 1.16, 1e-14);
    EXPECT_NEAR(kinetic_decay_roots(sigma, 0.4).mu_plus, 2.0 * 1.16 / (1.0 - 0.64), 1e-9);
}

TEST(KineticRoots, ParabolicLimit) {
    const auto r = kinetic_decay_roots(2.5, 1e-4);
    EXPECT_NEAR(r.mu_minus, 0.5, 1e-6);
    EXPECT_NEAR(r.mu_plus, 2.0, 1e-6);
    EXPECT_THROW(kinetic_decay_roots(1.9, 0.2), PreconditionError);
    EXPECT_THROW(kinetic_decay_roots(5.0, 0.25), PreconditionError);
}

TEST(KineticRoots, AgreeWithPolynomialRootFinding) {
    for (double eps : {0.05, 0.2, 0.4, 0.6}) {
        const double lo = 2.0 / (1.0 + eps * eps);
        for (double sigma = lo; sigma < 1.0 / eps - 1e-3; sigma += (1.0 / eps - lo) / 17.0) {
            const auto r = kinetic_decay_roots(sigma, eps);
            const CharPoly p = characteristic_polynomial(sigma, eps);
            // bisection on P, independent of the closed formula
            auto bisect = [&](double a, double b) {
                for (int k = 0; k < 200; ++k) {
                    const double m = 0.5 * (a + b);
                    ((p(a) > 0) == (p(m) > 0) ? a : b) = m;
                }
                return 0.5 * (a + b);
            };
            // P is written in the growth exponent X = -mu
            const double vertex = -p.b / (2.0 * p.a);
            if (p.discriminant() <= 0.0) {
                EXPECT_NEAR(r.mu_minus, -vertex, 1e-6);
                continue;
            }
            // a near-double root is only determined to about the square root of rounding
            const double tol = p.discriminant() < 1e-6 * p.b * p.b ? 1e-6 : 1e-10;
            EXPECT_NEAR(r.mu_minus, -bisect(vertex, -1e-12), tol);
            EXPECT_NEAR(r.mu_plus, -bisect(-1e6, vertex), tol * std::max(1.0, r.mu_plus));
            EXPECT_GT(r.mu_minus, 0.0);
        }
    }
}

TEST(KineticProfile, LeftStateAndContinuity) {
    const KineticWaveProfile kp = kinetic_profile(2.0, 0.25, kinetic_minimal_speed(2.0, 0.25), 1.3);
    const auto left = kp.value(-20.0);
    EXPECT_NEAR(left[0], 1.3 * 1.5, 1e-14);
    EXPECT_NEAR(left[1], 1.3 * 0.5, 1e-14);
    const auto l0 = kp.value(-1e-13), r0 = kp.value(1e-13);
    EXPECT_NEAR(l0[0], r0[0], 1e-10);
    EXPECT_NEAR(l0[1], r0[1], 1e-10);
    for (double z = -3.0; z <= 40.0; z += 0.1) {
        EXPECT_GE(kp.f_plus(z), 0.0);
        EXPECT_GE(kp.f_minus(z), 0.0);
    }
    EXPECT_THROW(kinetic_profile(2.0, 0.25, kinetic_minimal_speed(2.0, 0.25) - 1e-4, 1.0), PreconditionError);
    EXPECT_THROW(kinetic_profile(0.5, 1.2, 0.5, 1.0), PreconditionError);
}

TEST(KineticProfile, MatchesDirectOdeIntegration) {
    const double chi = 0.5, eps = 0.4, sigma = 2.0 / 1.16;
    const KineticWaveProfile kp = kinetic_profile(chi, eps, sigma, 1.0);
    EXPECT_TRUE(kp.double_root());
    const double e = 1.0 / eps, e2 = e * e;
    auto rhs = [&](const std::array<double, 2>& f) {
        return std::array<double, 2>{((e2 + 1) / 2 * f[1] - (e2 - 1) / 2 * f[0]) / (e - sigma),
                                     ((e2 + 1) / 2 * f[0] - (e2 - 1) / 2 * f[1]) / (-sigma - e)};
    };
    std::array<double, 2> f = kp.value(0.0);
    EXPECT_NEAR(f[0], 1.0 + eps * chi, 1e-12);
    const double h = 1e-4;
    for (int k = 1; k <= 100000; ++k) {
        const auto k1 = rhs(f);
        const auto k2 = rhs({f[0] + h / 2 * k1[0], f[1] + h / 2 * k1[1]});
        const auto k3 = rhs({f[0] + h / 2 * k2[0], f[1] + h / 2 * k2[1]});
        const auto k4 = rhs({f[0] + h * k3[0], f[1] + h * k3[1]});
        for (int j = 0; j < 2; ++j) f[j] += h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
        if (k % 10000 == 0) {
            const auto v = kp.value(k * h);
            EXPECT_NEAR(v[0], f[0], 1e-8 * (1 + f[0]));
            EXPECT_NEAR(v[1], f[1], 1e-8 * (1 + f[1]));
        }
    }
    // decay rate of the double root, not one
    const double mu = (1 + eps * eps) / (1 - eps * eps);
    EXPECT_NEAR(std::log(kp.rho(9.0) / kp.rho(10.0)), mu, 0.2);
}

TEST(KineticProfile, LeftRatioOnLadder) {
    for (double chi : {0.5, 1.5, 2.0})
        for (double eps : {0.1, 0.3}) {
            const KineticWaveProfile kp = kinetic_profile(chi, eps, kinetic_minimal_speed(chi, eps) + 0.05, 2.0);
            for (double z : {-0.5, -3.0, -30.0})
                EXPECT_NEAR(kp.f_plus(z) / kp.f_minus(z), (1 + eps * chi) / (1 - eps * chi), 1e-12);
        }
}

TEST(KineticProfile, SmallEpsilonMatchesParabolic) {
    const double eps = 1e-3;
    for (double chi : {0.5, 2.0}) {
        const KineticWaveProfile kp = kinetic_profile(chi, eps, kinetic_minimal_speed(chi, eps), 1.0);
        const WaveProfile wp = parabolic_profile(chi, minimal_speed(chi), 1.0);
        for (double z = -2.0; z <= 10.0; z += 0.25) EXPECT_NEAR(kp.rho(z), wp(z), 20.0 * eps) << z;
    }
}

TEST(ProfileCsv, ColumnsAndHeader) {
    const Grid1D g = build_grid(-10.0, 40.0, 500);
    ModelParams p;
    const WaveProfile wp = parabolic_profile(2.0, 2.5, 1.0);
    const NutrientProfile np = solve_nutrient_profile(wp, 1.0, 0.5, g);
    std::ostringstream os;
    write_profile_csv(os, wp.with_amplitude(np.a_left_calibrated), np, p);
    const std::string s = os.str();
    EXPECT_NE(s.find("z,rho,n\n"), std::string::npos);
    EXPECT_EQ(s.front(), '#');
    EXPECT_NE(s.find("sigma"), std::string::npos);
    std::size_t lines = 0;
    for (char c : s) lines += c == '\n';
    EXPECT_GE(lines, 501u);
}
