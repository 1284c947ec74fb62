#include "chns/initial.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace chns {

ScalarField spinodal_phase(const Grid& g, double phi_mean, double amplitude, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    ScalarField f(g);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = phi_mean + amplitude * (2.0 * uniform01(rng) - 1.0);
    return f;
}

ScalarField stripe_phase(const Grid& g, double width, double thickness, double fill)
{
    ScalarField f(g);
    const double yc = 0.5 * g.ly();
    for (int j = 0; j < g.ny(); ++j) {
        const double d = 0.5 * width - std::abs(g.yc(j) - yc);
        const double v = fill * std::tanh(d / (std::sqrt(2.0) * thickness));
        for (int i = 0; i < g.nx(); ++i)
            f(i, j) = v;
    }
    return f;
}

MacVelocity discrete_vortex(const Grid& g, double amplitude)
{
    const int nx = g.nx(), ny = g.ny();
    std::vector<double> psi(static_cast<std::size_t>(nx + 1) * (ny + 1));
    auto at = [&](int i, int j) -> double& { return psi[static_cast<std::size_t>(j) * (nx + 1) + i]; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            const double sx = std::sin(std::numbers::pi * g.xn(i) / g.lx());
            const double sy = std::sin(std::numbers::pi * g.yn(j) / g.ly());
            at(i, j) = amplitude * sx * sx * sy * sy;
        }
    for (int i = 0; i <= nx; ++i)
        at(i, 0) = at(i, ny) = 0.0;
    for (int j = 0; j <= ny; ++j)
        at(0, j) = at(nx, j) = 0.0;
    MacVelocity v(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i)
            v.u(i, j) = (at(i, j + 1) - at(i, j)) / g.hy();
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i)
            v.w(i, j) = -(at(i + 1, j) - at(i, j)) / g.hx();
    return v;
}

}  // namespace chns
