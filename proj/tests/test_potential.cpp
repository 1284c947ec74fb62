#include "chns/errors.hpp"
#include "chns/potential.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace chns;

// Reference values computed independently at 30 digits.
namespace oracle {
constexpr double psi_at_one = 0.554517744447956278;   // 0.8 ln 2
constexpr double ln3 = 1.09861228866810969;
}  // namespace oracle

TEST(Potential, ValuesAtZeroAndEndpoint)
{
    const Potential p = Potential::logarithmic(0.8, 1.0);
    EXPECT_DOUBLE_EQ(p.psi(0.0), 0.5);
    EXPECT_NEAR(p.psi(1.0), oracle::psi_at_one, 1e-15);
    EXPECT_NEAR(p.psi(-1.0), oracle::psi_at_one, 1e-15);
    EXPECT_THROW(p.psi(1.0000001), DomainError);
}

TEST(Potential, ConvexPartDerivatives)
{
    const Potential p = Potential::logarithmic(1.0, 1.0);
    EXPECT_NEAR(p.psi0_prime(0.8), oracle::ln3, 1e-15);
    EXPECT_EQ(p.psi_prime(0.0), 0.0);
    EXPECT_DOUBLE_EQ(p.psi0_second(0.0), 1.0);
    EXPECT_THROW(p.psi0_prime(1.0), DomainError);
    EXPECT_THROW(p.psi0_second(-1.5), DomainError);
}

TEST(Potential, Symmetry)
{
    const Potential p = Potential::logarithmic(0.8, 1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const double r = U(rng);
        EXPECT_DOUBLE_EQ(p.psi(r), p.psi(-r));
        EXPECT_DOUBLE_EQ(p.psi_prime(r), -p.psi_prime(-r));
    }
}

TEST(Potential, DerivativesMatchFiniteDifferences)
{
    for (const Potential& p : {Potential::logarithmic(0.8, 1.0), Potential::quartic()}) {
        for (double r = -0.99; r <= 0.99; r += 0.0275) {
            const double h = 1e-6 * (1.0 - std::abs(r));
            const double fd1 = (p.psi(r + h) - p.psi(r - h)) / (2 * h);
            EXPECT_NEAR(fd1, p.psi_prime(r), 1e-6 * std::max(1.0, std::abs(p.psi_prime(r)))) << r;
            const double fd2 = (p.psi0_prime(r + h) - p.psi0_prime(r - h)) / (2 * h);
            EXPECT_NEAR(fd2, p.psi0_second(r), 1e-6 * std::max(1.0, p.psi0_second(r))) << r;
            EXPECT_GE(p.psi0_second(r), p.kind() == PotentialKind::logarithmic ? p.theta() : 0.0);
        }
    }
}

TEST(Potential, ClampingIsCounted)
{
    const Potential p = Potential::logarithmic(1.0, 1.0, 1e-10);
    ClampCounter c;
    const double near = 1.0 - 1e-13;
    const double v = p.psi0_prime(near, &c);
    EXPECT_EQ(c.value(), 1);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_DOUBLE_EQ(v, p.psi0_prime(1.0 - 1e-10));
    p.psi0_prime(0.5, &c);
    EXPECT_EQ(c.value(), 1);
}

TEST(Hypotheses, LogarithmicPasses)
{
    const HypothesisReport r = validate_hypotheses(Potential::logarithmic(0.8, 1.0), 2000);
    EXPECT_TRUE(r.passed) << r.failure;
    EXPECT_LE(r.min_growth_constant, r.growth_bound);
    EXPECT_TRUE(r.warning.empty());
}

TEST(Hypotheses, QuarticPassesTrivially)
{
    const HypothesisReport r = validate_hypotheses(Potential::quartic(), 200);
    EXPECT_TRUE(r.passed);
    EXPECT_TRUE(r.trivial);
}

TEST(Hypotheses, CorruptedConvexPartFailsAtHalf)
{
    ConvexPart part = convex_part(Potential::logarithmic(0.8, 1.0));
    const auto good = part.second;
    part.second = [good](double r) { return std::abs(r - 0.5) < 1e-3 ? 0.1 : good(r); };
    const HypothesisReport r = validate_hypotheses(part, 1001);
    ASSERT_FALSE(r.passed);
    ASSERT_TRUE(r.violating_r.has_value());
    EXPECT_NEAR(*r.violating_r, 0.5, 1e-3);
}

TEST(Hypotheses, WarnsWithoutDoubleWell)
{
    const HypothesisReport r = validate_hypotheses(Potential::logarithmic(1.2, 1.0), 200);
    EXPECT_TRUE(r.passed);
    EXPECT_FALSE(r.warning.empty());
}

TEST(Hypotheses, RejectsTooFewSamples)
{
    EXPECT_THROW(validate_hypotheses(Potential::logarithmic(0.8, 1.0), 10), ConfigError);
}
