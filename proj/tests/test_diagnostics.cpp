#include "chns/diagnostics.hpp"
#include "chns/elliptic.hpp"
#include "chns/errors.hpp"
#include "chns/initial.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace chns;

namespace {

SimState state(const PhysParams& p, const MacVelocity& v, const ScalarField& phi, const ScalarField& sigma)
{
    return make_state(p, v, phi, sigma);
}

}  // namespace

TEST(Energy, ZeroStateIsHalfTheta0)
{
    const Grid g(10, 10);
    PhysParams p;
    const SimState s = state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 0.0));
    EXPECT_NEAR(energy(s, p), 0.5, 1e-15);
}

TEST(Energy, UnitNutrientWithChiTwo)
{
    const Grid g(10, 10);
    PhysParams p;
    p.chi = 2.0;
    const SimState s = state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 1.0));
    EXPECT_NEAR(energy(s, p), 0.5 + 0.5 + 2.0, 1e-14);
}

TEST(Energy, PressureDoesNotEnter)
{
    const Grid g(12, 12);
    PhysParams p;
    p.chi = 0.3;
    SimState s = state(p, discrete_vortex(g, 0.2), spinodal_phase(g, 0.0, 0.3, 1), ScalarField(g, 0.4));
    const double e0 = energy(s, p);
    s.p += ScalarField(g, 17.0);
    EXPECT_EQ(energy(s, p), e0);
}

TEST(Energy, LambdaVariantWeights)
{
    const Grid g(8, 8);
    PhysParams p;
    p.chi = 0.5;
    p.lambda = 0.25;
    EXPECT_DOUBLE_EQ(nutrient_weight(p), 2.0);
    const SimState s = state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 1.0));
    EXPECT_NEAR(energy(s, p), 0.5 + 0.5 * 2.0 + 0.5, 1e-14);
    p.chi = 0.0;
    p.lambda = 0.0;
    EXPECT_DOUBLE_EQ(nutrient_weight(p), 1.0);
    p.chi = 0.1;
    EXPECT_THROW(nutrient_weight(p), ConfigError);
}

TEST(Energy, QuadratureConvergesAtSecondOrder)
{
    PhysParams p;
    p.chi = 0.2;
    std::vector<double> e;
    for (int n : {16, 32, 64, 128}) {
        const Grid g(n, n);
        const ScalarField phi = ScalarField::sample(g, [](double x, double y) {
            return 0.5 * std::cos(std::numbers::pi * x) * std::cos(std::numbers::pi * y);
        });
        const ScalarField sig = ScalarField::sample(g, [](double x, double) { return 1.0 + x * x; });
        e.push_back(energy(state(p, MacVelocity(g), phi, sig), p));
    }
    const double o1 = std::log2(std::abs(e[1] - e[0]) / std::abs(e[2] - e[1]));
    const double o2 = std::log2(std::abs(e[2] - e[1]) / std::abs(e[3] - e[2]));
    EXPECT_NEAR(o1, 2.0, 0.2);
    EXPECT_NEAR(o2, 2.0, 0.2);
}

TEST(Dissipation, ZeroForGradientFreeState)
{
    const Grid g(10, 10);
    PhysParams p;
    EXPECT_EQ(dissipation(state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 0.0)), p), 0.0);
    p.chi = 0.4;
    // phi, sigma and therefore mu spatially constant.
    EXPECT_NEAR(dissipation(state(p, MacVelocity(g), ScalarField(g, 0.3), ScalarField(g, 0.2)), p), 0.0, 1e-20);
}

TEST(Dissipation, NonNegativeForRandomStates)
{
    const Grid g(16, 16);
    PhysParams p;
    p.chi = 0.3;
    p.eta1 = 0.1;
    p.eta2 = 3.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const SimState s =
            state(p, discrete_vortex(g, 0.5), spinodal_phase(g, 0.0, 0.9, seed), spinodal_phase(g, 0.3, 0.3, seed + 9));
        EXPECT_GE(dissipation(s, p), 0.0);
        EXPECT_GE(energy(s, p), energy_lower_bound(s, p));
    }
}

TEST(Residual, ZeroStateHasZeroResidual)
{
    const Grid g(8, 8);
    PhysParams p;
    const SimState s = state(p, MacVelocity(g), ScalarField(g, 0.0), ScalarField(g, 0.0));
    EXPECT_EQ(energy_law_residual(s, s, p, 0.1), 0.0);
}

TEST(Record, MarginMatchesSeparationMargin)
{
    const Grid g(12, 12);
    PhysParams p;
    const SimState s = state(p, MacVelocity(g), spinodal_phase(g, 0.0, 0.7, 3), ScalarField(g, 0.0));
    EXPECT_EQ(make_record(s, p).margin, separation_margin(s.phi));
}

TEST(MeanLaw, RecurrenceWithAlphaOne)
{
    PhysParams p;
    p.alpha = 1.0;
    p.c0 = 0.1;
    std::vector<DiagnosticsRecord> series(3);
    for (int n = 0; n < 3; ++n) {
        series[n].step = n;
        series[n].dt = n ? 0.1 : 0.0;
        series[n].t = 0.1 * n;
        series[n].phi_mean = 0.1 + 0.2 / std::pow(1.1, n);
    }
    const MeanLawReport r = analytic_mean_law_check(series, p);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.max_recurrence_error, 1e-14);
    series[2].phi_mean += 1e-6;
    EXPECT_FALSE(analytic_mean_law_check(series, p).passed);
}

TEST(MeanLaw, ConservedWithoutAlpha)
{
    PhysParams p;
    std::vector<DiagnosticsRecord> series(4);
    for (int n = 0; n < 4; ++n) {
        series[n].dt = n ? 0.01 : 0.0;
        series[n].t = 0.01 * n;
        series[n].phi_mean = -0.3;
    }
    const MeanLawReport r = analytic_mean_law_check(series, p);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.final_continuous_error, 0.0);
}

TEST(Csv, HeaderAndRowHaveSameColumnCount)
{
    std::ostringstream h, r;
    write_csv_header(h);
    write_csv_row(r, DiagnosticsRecord{});
    auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
    EXPECT_EQ(commas(h.str()), commas(r.str()));
}
