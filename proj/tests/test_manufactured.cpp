#include "chns/manufactured.hpp"
#include "chns/run.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chns;

// The forcings are checked against finite differences of the exact fields,
// an oracle independent of the hand-derived formulas.
namespace {

PhysParams params()
{
    PhysParams p;
    p.A = 1.0;
    p.B = 0.02;
    p.chi = 0.2;
    p.lambda = 0.15;
    p.alpha = 0.5;
    p.c0 = 0.1;
    p.consumption = 0.3;
    p.eta1 = 1.0;
    p.eta2 = 0.5;
    p.potential = Potential::logarithmic(0.8, 1.0);
    return p;
}

constexpr double h = 1e-4;

template <class F>
double dx(F f, double x, double y) { return (f(x + h, y) - f(x - h, y)) / (2 * h); }
template <class F>
double dy(F f, double x, double y) { return (f(x, y + h) - f(x, y - h)) / (2 * h); }

const double points[][3] = {{0.23, 0.61, 0.0}, {0.71, 0.18, 0.4}, {0.5, 0.5, 1.3}, {0.05, 0.93, 2.0}};

}  // namespace

TEST(Manufactured, ExactFieldsSatisfyBoundaryConditions)
{
    const Manufactured m(params());
    for (double s = 0.0; s <= 1.0; s += 0.125) {
        EXPECT_NEAR(m.u(0.0, s, 0.3), 0.0, 1e-15);
        EXPECT_NEAR(m.u(s, 0.0, 0.3), 0.0, 1e-15);
        EXPECT_NEAR(m.w(s, 1.0, 0.3), 0.0, 1e-15);
        auto phi = [&](double x, double y) { return m.phi(x, y, 0.3); };
        EXPECT_NEAR(dx(phi, 1.0 - h, s), 0.0, 1e-3);
    }
}

TEST(Manufactured, PhaseForcingMatchesFiniteDifferences)
{
    const PhysParams p = params();
    const Manufactured m(p);
    for (const auto& pt : points) {
        const double x = pt[0], y = pt[1], t = pt[2];
        auto phi = [&](double a, double b) { return m.phi(a, b, t); };
        auto mu = [&](double a, double b) { return m.mu(a, b, t); };
        const double phit = (m.phi(x, y, t + h) - m.phi(x, y, t - h)) / (2 * h);
        auto mux = [&](double a, double b) { return dx(mu, a, b); };
        auto muy = [&](double a, double b) { return dy(mu, a, b); };
        const double lap_mu = dx(mux, x, y) + dy(muy, x, y);
        const double expected =
            phit + m.u(x, y, t) * dx(phi, x, y) + m.w(x, y, t) * dy(phi, x, y) - lap_mu + p.alpha * (phi(x, y) - p.c0);
        EXPECT_NEAR(m.force_phi(x, y, t), expected, 1e-5 * (1.0 + std::abs(expected)));
    }
}

TEST(Manufactured, ChemicalPotentialMatchesDefinition)
{
    const PhysParams p = params();
    const Manufactured m(p);
    for (const auto& pt : points) {
        const double x = pt[0], y = pt[1], t = pt[2];
        auto phi = [&](double a, double b) { return m.phi(a, b, t); };
        auto px = [&](double a, double b) { return dx(phi, a, b); };
        auto py = [&](double a, double b) { return dy(phi, a, b); };
        const double lap = dx(px, x, y) + dy(py, x, y);
        const double expected = p.A * p.potential.psi_prime(phi(x, y)) - p.B * lap - p.chi * m.sigma(x, y, t);
        EXPECT_NEAR(m.mu(x, y, t), expected, 1e-6);
    }
}

TEST(Manufactured, NutrientForcingMatchesFiniteDifferences)
{
    const PhysParams p = params();
    const Manufactured m(p);
    for (const auto& pt : points) {
        const double x = pt[0], y = pt[1], t = pt[2];
        auto sig = [&](double a, double b) { return m.sigma(a, b, t); };
        // sigma + lambda (1 - phi) diffuses.
        auto q = [&](double a, double b) { return m.sigma(a, b, t) + p.lam() * (1.0 - m.phi(a, b, t)); };
        auto qx = [&](double a, double b) { return dx(q, a, b); };
        auto qy = [&](double a, double b) { return dy(q, a, b); };
        const double sigt = (m.sigma(x, y, t + h) - m.sigma(x, y, t - h)) / (2 * h);
        const double expected = sigt + m.u(x, y, t) * dx(sig, x, y) + m.w(x, y, t) * dy(sig, x, y) -
                                (dx(qx, x, y) + dy(qy, x, y)) + p.consumption * p.h(m.phi(x, y, t)) * sig(x, y);
        EXPECT_NEAR(m.force_sigma(x, y, t), expected, 1e-5 * (1.0 + std::abs(expected)));
    }
}

TEST(Manufactured, MomentumForcingMatchesFiniteDifferences)
{
    const PhysParams p = params();
    const Manufactured m(p);
    for (const auto& pt : points) {
        const double x = pt[0], y = pt[1], t = pt[2];
        auto u = [&](double a, double b) { return m.u(a, b, t); };
        auto w = [&](double a, double b) { return m.w(a, b, t); };
        auto eta = [&](double a, double b) { return p.eta(m.phi(a, b, t)); };
        auto phi = [&](double a, double b) { return m.phi(a, b, t); };
        // div(2 eta D v), component by component.
        auto sxx = [&](double a, double b) { return 2.0 * eta(a, b) * dx(u, a, b); };
        auto sxy = [&](double a, double b) { return eta(a, b) * (dy(u, a, b) + dx(w, a, b)); };
        auto syy = [&](double a, double b) { return 2.0 * eta(a, b) * dy(w, a, b); };
        const double visc_u = dx(sxx, x, y) + dy(sxy, x, y);
        const double visc_w = dx(sxy, x, y) + dy(syy, x, y);
        const double coupling = m.mu(x, y, t) + p.chi * m.sigma(x, y, t);
        const double ut = (m.u(x, y, t + h) - m.u(x, y, t - h)) / (2 * h);
        const double wt = (m.w(x, y, t + h) - m.w(x, y, t - h)) / (2 * h);
        const double fu = ut + u(x, y) * dx(u, x, y) + w(x, y) * dy(u, x, y) - visc_u - coupling * dx(phi, x, y);
        const double fw = wt + u(x, y) * dx(w, x, y) + w(x, y) * dy(w, x, y) - visc_w - coupling * dy(phi, x, y);
        EXPECT_NEAR(m.force_u(x, y, t), fu, 1e-5 * (1.0 + std::abs(fu)));
        EXPECT_NEAR(m.force_w(x, y, t), fw, 1e-5 * (1.0 + std::abs(fw)));
    }
}

TEST(Manufactured, SampledVelocityIsDivergenceFree)
{
    const Manufactured m(params());
    const Grid g(24, 24);
    EXPECT_LE(linf_norm(divergence(m.sample_state(g, 0.7).v)), 1e-13);
}

TEST(Manufactured, ErrorIsZeroAtStartAndSmallAfterSteps)
{
    const PhysParams p = params();
    const Manufactured m(p);
    const Grid g(16, 16);
    const SimState s0 = m.sample_state(g, 0.0);
    const FieldErrors e0 = manufactured_errors(m, s0);
    EXPECT_EQ(e0.phi, 0.0);
    EXPECT_EQ(e0.sigma, 0.0);
    EXPECT_EQ(e0.velocity, 0.0);

    StepperConfig c;
    c.dt = 0.01;
    Stepper st(g, p, c);
    st.set_forcing(m.forcing());
    const RunResult r = run_steps(st, s0, 5);
    const FieldErrors e = manufactured_errors(m, r.final_state);
    EXPECT_LT(e.phi, 0.02);
    EXPECT_LT(e.sigma, 0.02);
    EXPECT_LT(e.velocity, 0.02);
}
