#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gogrow/core.hpp"
#include "gogrow/csv.hpp"

using namespace gog;

TEST(Grid, TwoCellsOnUnitInterval) {
    const Grid1D g = build_grid(0.0, 1.0, 2);
    EXPECT_DOUBLE_EQ(g.dz(), 0.5);
    const auto c = g.centers();
    ASSERT_EQ(c.size(), 2u);
    EXPECT_DOUBLE_EQ(c[0], 0.25);
    EXPECT_DOUBLE_EQ(c[1], 0.75);
}

TEST(Grid, SpacingFromCellCount) {
    EXPECT_NEAR(build_grid(-50.0, 300.0, 7000).dz(), 0.05, 1e-15);
}

TEST(Grid, RejectsBadArguments) {
    EXPECT_THROW(build_grid(1.0, 0.0, 10), PreconditionError);
    EXPECT_THROW(build_grid(0.0, 1.0, 1), PreconditionError);
    EXPECT_THROW(build_grid(0.0, INFINITY, 10), PreconditionError);
    EXPECT_THROW(build_grid(NAN, 1.0, 10), PreconditionError);
}

TEST(Grid, CentersStrictlyIncreasing) {
    const Grid1D g = build_grid(-3.0, 7.0, 137);
    const auto c = g.centers();
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LT(c[i - 1], c[i]);
    EXPECT_NEAR(g.face(g.n_cells()), 7.0, 1e-12);
}

TEST(Field, RejectsWrongLengthAndNonFinite) {
    const Grid1D g = build_grid(0.0, 1.0, 4);
    EXPECT_THROW(Field(g, {1.0, 2.0}), PreconditionError);
    EXPECT_THROW(Field(g, {1.0, 2.0, NAN, 0.0}), NumericalError);
}

TEST(Field, InterpolateIsClampedOutsideCentres) {
    const Grid1D g = build_grid(0.0, 4.0, 4);
    const Field f = Field::from_function(g, [](double z) { return 2.0 * z; });
    EXPECT_DOUBLE_EQ(f.interpolate(1.0), 2.0);
    EXPECT_DOUBLE_EQ(f.interpolate(-5.0), 1.0);
    EXPECT_DOUBLE_EQ(f.interpolate(9.0), 7.0);
}

TEST(Integrate, ConstantOnUnitInterval) {
    const Grid1D g = build_grid(0.0, 1.0, 100);
    EXPECT_NEAR(integrate(Field::constant(g, 1.0)), 1.0, g.dz());
}

TEST(Integrate, IdentityOnUnitInterval) {
    const Grid1D g = build_grid(0.0, 1.0, 100);
    EXPECT_NEAR(integrate(Field::from_function(g, [](double z) { return z; })), 0.5, 4.0 * g.dz() * g.dz());
}

TEST(Integrate, ExponentialWeight) {
    const Grid1D g = build_grid(0.0, 40.0, 4000);
    const Field w = Field::from_function(g, [](double z) { return std::exp(-z); });
    // antiderivative oracle: 1 - e^{-40}
    EXPECT_NEAR(integrate(Field::constant(g, 1.0), w), 1.0 - std::exp(-40.0), 2.0 * g.dz() * g.dz());
}

TEST(Integrate, LinearAndNonnegative) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid1D g = build_grid(-2.0, 3.0, 57);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(57), b(57), w(57);
        for (int i = 0; i < 57; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            w[i] = u(rng);
        }
        const double alpha = 3.0 * u(rng) - 1.5, beta = 3.0 * u(rng) - 1.5;
        std::vector<double> comb(57);
        for (int i = 0; i < 57; ++i) comb[i] = alpha * a[i] + beta * b[i];
        const Field fa(g, a), fb(g, b), fw(g, w), fc(g, comb);
        EXPECT_NEAR(integrate(fc), alpha * integrate(fa) + beta * integrate(fb), 1e-12);
        EXPECT_NEAR(integrate(fc, fw), alpha * integrate(fa, fw) + beta * integrate(fb, fw), 1e-12);
        std::vector<double> w2(57);
        for (int i = 0; i < 57; ++i) w2[i] = alpha * w[i];
        EXPECT_NEAR(integrate(fa, Field(g, w2)), alpha * integrate(fa, fw), 1e-12);
        EXPECT_GE(integrate(fa), 0.0);
        EXPECT_GE(integrate(fa, fw), 0.0);
    }
}

TEST(Integrate, SecondOrderOnSine) {
    auto err = [](int n) {
        const Grid1D g = build_grid(0.0, 2.0, n);
        return std::abs(integrate(Field::from_function(g, [](double z) { return std::sin(z); })) -
                        (1.0 - std::cos(2.0)));
    };
    const double e1 = err(100), e2 = err(200), e3 = err(400);
    EXPECT_NEAR(e1 / e2, 4.0, 0.3);
    EXPECT_NEAR(e2 / e3, 4.0, 0.3);
}

TEST(Integrate, MismatchedWeightGridThrows) {
    EXPECT_THROW(integrate(Field::constant(build_grid(0, 1, 4), 1.0), Field::constant(build_grid(0, 1, 5), 1.0)),
                 PreconditionError);
}

TEST(ModelParams, Validation) {
    ModelParams p;
    EXPECT_NO_THROW(p.validate());
    p.chi = 0.0;
    EXPECT_THROW(p.validate(), PreconditionError);
    p = {};
    p.n_threshold = 1.0;
    EXPECT_THROW(p.validate(), PreconditionError);
    p = {};
    p.diffusion_n = -1.0;
    EXPECT_THROW(p.validate(), PreconditionError);
    p = {};
    p.epsilon = 0.0;
    EXPECT_THROW(p.validate(), PreconditionError);
}

TEST(State, ValidatesRanges) {
    const Grid1D g = build_grid(0.0, 1.0, 4);
    EXPECT_NO_THROW(State::make(Field::constant(g, 0.3), Field::constant(g, 0.5)).validate());
    EXPECT_THROW(State::make(Field(g, {0, -1e-3, 0, 0}), Field::constant(g, 0.5)).validate(), PreconditionError);
    EXPECT_THROW(State::make(Field::constant(g, 0.0), Field::constant(g, 1.5)).validate(), PreconditionError);
    EXPECT_THROW(State::make(Field::constant(g, 0.0), Field::constant(build_grid(0, 1, 5), 0.5)).validate(),
                 PreconditionError);
}

TEST(Csv, RoundTripDigitsAndLayout) {
    for (double x : {0.1, 1.0 / 3.0, 2.5601699822473165, -1e-300, 6.02214076e23})
        EXPECT_EQ(std::stod(format_real(x)), x);
    CsvTable t({"a", "b"});
    t.comment("hello");
    t.add_row({1.0, 0.5});
    std::ostringstream os;
    t.write(os);
    EXPECT_EQ(os.str(), "# hello\na,b\n1,0.5\n");
    EXPECT_THROW(t.add_row({1.0}), PreconditionError);
}
