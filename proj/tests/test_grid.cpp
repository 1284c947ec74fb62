#include "chns/errors.hpp"
#include "chns/grid.hpp"
#include "chns/initial.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace chns;

namespace {

constexpr double pi = std::numbers::pi;

ScalarField random_field(const Grid& g, std::mt19937_64& rng)
{
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = 2.0 * uniform01(rng) - 1.0;
    return f;
}

FaceField random_velocity(const Grid& g, std::mt19937_64& rng)
{
    FaceField v(g);
    for (auto& x : v.u_values())
        x = 2.0 * uniform01(rng) - 1.0;
    for (auto& x : v.w_values())
        x = 2.0 * uniform01(rng) - 1.0;
    v.zero_boundary_normal();
    return v;
}

}  // namespace

TEST(Gradient, ConstantFieldHasZeroGradient)
{
    const Grid g(12, 9, 1.0, 0.7);
    EXPECT_EQ(linf_norm(gradient(ScalarField(g, 3.0))), 0.0);
}

TEST(Gradient, LinearFieldIsExactInInterior)
{
    const Grid g(16, 10, 2.0, 1.0);
    const FaceField gf = gradient(ScalarField::sample(g, [](double x, double) { return x; }));
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 1; i < g.nx(); ++i)
            EXPECT_NEAR(gf.u(i, j), 1.0, 1e-13);
        EXPECT_EQ(gf.u(0, j), 0.0);
        EXPECT_EQ(gf.u(g.nx(), j), 0.0);
    }
}

TEST(Gradient, SecondOrderForCosine)
{
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const Grid g(n, n);
        const FaceField gf = gradient(ScalarField::sample(g, [](double x, double) { return std::cos(2 * pi * x); }));
        double e = 0.0;
        for (int j = 0; j < n; ++j)
            for (int i = 1; i < n; ++i)
                e = std::max(e, std::abs(gf.u(i, j) + 2 * pi * std::sin(2 * pi * g.xn(i))));
        err.push_back(e);
    }
    for (std::size_t k = 1; k < err.size(); ++k)
        EXPECT_NEAR(std::log2(err[k - 1] / err[k]), 2.0, 0.2);
}

TEST(Divergence, ZeroVelocity)
{
    const Grid g(8, 8);
    EXPECT_EQ(linf_norm(divergence(FaceField(g))), 0.0);
}

TEST(Divergence, UniformFlowOnlyFeedsBoundaryCells)
{
    const Grid g(10, 10);
    FaceField v = FaceField::sample(g, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
    v.zero_boundary_normal();
    const ScalarField d = divergence(v);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (i != 0 && i != g.nx() - 1)
                EXPECT_EQ(d(i, j), 0.0);
            else
                EXPECT_NE(d(i, j), 0.0);
    EXPECT_NEAR(integral(d), 0.0, 1e-14);
}

TEST(Divergence, SampledStreamFunctionFieldConvergesAtSecondOrder)
{
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const Grid g(n, n);
        // psi = sin(pi x) sin(2 pi y); u = psi_y, w = -psi_x. Unequal wavenumbers keep the
        // truncation errors of the two flux differences from cancelling.
        const FaceField v = FaceField::sample(
            g, [](double x, double y) { return 2 * pi * std::sin(pi * x) * std::cos(2 * pi * y); },
            [](double x, double y) { return -pi * std::cos(pi * x) * std::sin(2 * pi * y); });
        err.push_back(linf_norm(divergence(v)));
    }
    // Point samples of a solenoidal field: the centered flux balance is second order.
    for (std::size_t k = 1; k < err.size(); ++k)
        EXPECT_NEAR(std::log2(err[k - 1] / err[k]), 2.0, 0.2);
}

TEST(Laplacian, ConstantFieldIsAnnihilated)
{
    const Grid g(9, 7);
    EXPECT_EQ(linf_norm(laplacian_neumann(ScalarField(g, -2.5))), 0.0);
}

TEST(Laplacian, SecondOrderForNeumannCosine)
{
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        const Grid g(n, n, 2.0, 1.0);
        const ScalarField f = ScalarField::sample(g, [](double x, double) { return std::cos(pi * x / 2.0); });
        ScalarField e = laplacian_neumann(f);
        for (std::size_t k = 0; k < e.size(); ++k)
            e[k] += (pi / 2.0) * (pi / 2.0) * f[k];
        err.push_back(linf_norm(e));
    }
    for (std::size_t k = 1; k < err.size(); ++k)
        EXPECT_NEAR(std::log2(err[k - 1] / err[k]), 2.0, 0.2);
}

TEST(Laplacian, DivergenceOfGradientEqualsLaplacian)
{
    std::mt19937_64 rng(7);
    const Grid g(20, 13, 1.3, 0.9);
    const ScalarField f = random_field(g, rng);
    const ScalarField a = divergence(gradient(f));
    const ScalarField b = laplacian_neumann(f);
    EXPECT_LE(linf_norm(a - b), 1e-13 * linf_norm(b));
}

TEST(Laplacian, SelfAdjointAndTelescoping)
{
    std::mt19937_64 rng(3);
    const Grid g(24, 16);
    for (int trial = 0; trial < 5; ++trial) {
        const ScalarField f = random_field(g, rng), q = random_field(g, rng);
        const ScalarField lf = laplacian_neumann(f), lq = laplacian_neumann(q);
        const double scale = l2_norm(lf) * l2_norm(q) + l2_norm(f) * l2_norm(lq);
        EXPECT_LE(std::abs(inner_product(lf, q) - inner_product(f, lq)), 1e-12 * scale);
        double sum = 0.0, abs_sum = 0.0;
        for (std::size_t k = 0; k < lf.size(); ++k) {
            sum += lf[k];
            abs_sum += std::abs(lf[k]);
        }
        EXPECT_LE(std::abs(sum), 1e-13 * abs_sum);
    }
}

TEST(Advection, ZeroVelocityAndUnitScalar)
{
    std::mt19937_64 rng(11);
    const Grid g(10, 12);
    const ScalarField f = random_field(g, rng);
    EXPECT_EQ(linf_norm(advect_conservative(FaceField(g), f, FaceInterpolation::centered)), 0.0);
    const FaceField v = random_velocity(g, rng);
    for (auto interp : {FaceInterpolation::centered, FaceInterpolation::upwind}) {
        const ScalarField a = advect_conservative(v, ScalarField(g, 1.0), interp);
        EXPECT_LE(linf_norm(a - divergence(v)), 1e-13 * linf_norm(a));
    }
}

TEST(Advection, AreaWeightedSumVanishes)
{
    std::mt19937_64 rng(5);
    const Grid g(32, 24);
    for (int trial = 0; trial < 10; ++trial) {
        const FaceField v = random_velocity(g, rng);
        const ScalarField f = random_field(g, rng);
        for (auto interp : {FaceInterpolation::centered, FaceInterpolation::upwind}) {
            const ScalarField a = advect_conservative(v, f, interp);
            double sum = 0.0, abs_sum = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                sum += a[k];
                abs_sum += std::abs(a[k]);
            }
            EXPECT_LE(std::abs(sum), 1e-13 * abs_sum);
        }
    }
}

TEST(Operators, Linearity)
{
    std::mt19937_64 rng(13);
    const Grid g(15, 11);
    const ScalarField f = random_field(g, rng), q = random_field(g, rng);
    const double a = 0.7, b = -1.9;
    const ScalarField lhs = laplacian_neumann(a * f + b * q);
    const ScalarField rhs = a * laplacian_neumann(f) + b * laplacian_neumann(q);
    EXPECT_LE(linf_norm(lhs - rhs), 1e-12 * linf_norm(lhs));
    const FaceField gl = gradient(a * f + b * q);
    const FaceField gr = a * gradient(f) + b * gradient(q);
    EXPECT_LE(linf_norm(gl - gr), 1e-12 * linf_norm(gl));
}

TEST(Quadrature, NormsAndInnerProducts)
{
    const Grid g(10, 10);
    const ScalarField one(g, 1.0);
    EXPECT_DOUBLE_EQ(inner_product(one, one), 1.0);
    std::mt19937_64 rng(1);
    const ScalarField f = random_field(g, rng);
    EXPECT_DOUBLE_EQ(l2_norm(f) * l2_norm(f), inner_product(f, f));
    EXPECT_EQ(kinetic_energy(FaceField(g)), 0.0);
}

TEST(Quadrature, GridMismatchThrows)
{
    const ScalarField a(Grid(8, 8)), b(Grid(8, 9));
    EXPECT_THROW(inner_product(a, b), GridMismatch);
}

TEST(Ghosts, ReflectionRules)
{
    const Grid g(4, 4);
    ScalarField f = ScalarField::sample(g, [](double x, double y) { return x + 10 * y; });
    EXPECT_EQ(f.with_ghost(-1, 2), f(0, 2));
    EXPECT_EQ(f.with_ghost(4, 1), f(3, 1));
    FaceField v = FaceField::sample(g, [](double, double y) { return y; }, [](double x, double) { return x; });
    EXPECT_EQ(v.u_ghost(2, -1), -v.u(2, 0));
    EXPECT_EQ(v.w_ghost(4, 2), -v.w(3, 2));
}

TEST(Vortex, DiscreteVortexIsDivergenceFree)
{
    const Grid g(33, 20, 1.0, 0.6);
    const MacVelocity v = discrete_vortex(g, 0.3);
    EXPECT_LE(linf_norm(divergence(v)), 1e-12);
    EXPECT_GT(kinetic_energy(v), 0.0);
}
