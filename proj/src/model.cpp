#include "chns/model.hpp"

#include "chns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chns {

double SourceSpec::eval(double x, double y, double t) const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::constant:
        return amplitude;
    case Kind::gaussian_bump: {
        const double dx = x - x0, dy = y - y0;
        return amplitude * std::exp(-decay * t) * std::exp(-(dx * dx + dy * dy) / (2.0 * width * width));
    }
    case Kind::tabulated: {
        if (t <= times.front())
            return values.front();
        if (t >= times.back())
            return values.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto k = static_cast<std::size_t>(it - times.begin());
        const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return (1.0 - s) * values[k - 1] + s * values[k];
    }
    }
    return 0.0;
}

ScalarField SourceSpec::sample(const Grid& g, double t) const
{
    if (kind == Kind::zero)
        return ScalarField(g, 0.0);
    return ScalarField::sample(g, [&](double x, double y) { return eval(x, y, t); });
}

void SourceSpec::validate() const
{
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(amplitude) || !finite(x0) || !finite(y0) || !finite(decay))
        throw ConfigError("(H4) source parameters must be finite");
    if (kind == Kind::gaussian_bump && !(width > 0.0))
        throw ConfigError("(H4) gaussian source width must be positive");
    if (kind == Kind::tabulated) {
        if (times.empty() || times.size() != values.size())
            throw ConfigError("(H4) tabulated source needs matching, non-empty times and values");
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (!finite(times[k]) || !finite(values[k]))
                throw ConfigError("(H4) tabulated source entries must be finite");
            if (k > 0 && !(times[k] > times[k - 1]))
                throw ConfigError("(H4) tabulated source times must be strictly increasing");
        }
    }
}

std::string to_string(SourceSpec::Kind k)
{
    switch (k) {
    case SourceSpec::Kind::zero:
        return "zero";
    case SourceSpec::Kind::constant:
        return "constant";
    case SourceSpec::Kind::gaussian_bump:
        return "gaussian-bump";
    case SourceSpec::Kind::tabulated:
        return "tabulated";
    }
    return "zero";
}

SourceSpec::Kind source_kind_from_string(const std::string& s)
{
    if (s == "zero")
        return SourceSpec::Kind::zero;
    if (s == "constant")
        return SourceSpec::Kind::constant;
    if (s == "gaussian-bump")
        return SourceSpec::Kind::gaussian_bump;
    if (s == "tabulated")
        return SourceSpec::Kind::tabulated;
    throw ConfigError("unknown source kind '" + s + "'");
}

double PhysParams::eta(double phi) const
{
    const double r = std::clamp(phi, -1.0, 1.0);
    return eta1 * 0.5 * (1.0 + r) + eta2 * 0.5 * (1.0 - r);
}

double PhysParams::h(double phi) const { return std::clamp(0.5 * (1.0 + phi), 0.0, 1.0); }

void PhysParams::validate() const
{
    if (!(eta1 > 0.0) || !(eta2 > 0.0) || !std::isfinite(eta1) || !std::isfinite(eta2))
        throw ConfigError("(H1) viscosities eta1, eta2 must be positive");
    if (!(A > 0.0) || !std::isfinite(A))
        throw ConfigError("(H5) A must be positive");
    if (!(B > 0.0) || !std::isfinite(B))
        throw ConfigError("(H5) B must be positive");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw ConfigError("(H5) alpha must be nonnegative");
    if (!(c0 > -1.0 && c0 < 1.0))
        throw ConfigError("(H5) c0 must lie in (-1, 1)");
    if (!std::isfinite(chi) || !std::isfinite(lam()) || !std::isfinite(consumption))
        throw ConfigError("(H5) chi, lambda and the consumption rate must be finite");
    source.validate();
}

void StepperConfig::validate() const
{
    if (!(dt > 0.0))
        throw ConfigError("dt must be positive");
    if (dt_max && !(*dt_max >= dt))
        throw ConfigError("dt_max must be at least dt");
    if (!(cfl_max > 0.0 && cfl_max <= 1.0))
        throw ConfigError("cfl_max must lie in (0, 1]");
    if (!(newton_tol > 0.0) || !(projection_tol > 0.0) || !(linear_tol > 0.0))
        throw ConfigError("solver tolerances must be positive");
    if (max_newton < 1)
        throw ConfigError("max_newton must be at least 1");
    if (picard_kmax < 1)
        throw ConfigError("picard k_max must be at least 1");
    if (!(dt_min > 0.0))
        throw ConfigError("dt_min must be positive");
}

ScalarField chemical_potential(const PhysParams& p, const ScalarField& phi, const ScalarField& sigma,
                               ClampCounter* clamps)
{
    ScalarField mu = laplacian_neumann(phi);
    for (std::size_t k = 0; k < mu.size(); ++k)
        mu[k] = p.A * p.potential.psi_prime(phi[k], clamps) - p.B * mu[k] - p.chi * sigma[k];
    return mu;
}

SimState make_state(const PhysParams& params, const MacVelocity& v, ScalarField phi, const ScalarField& sigma,
                    double t, int* clamped_cells)
{
    const double m = mean(phi);
    if (!(std::abs(m) < 1.0)) {
        std::ostringstream os;
        os << "initial phase mean " << m << " violates |mean(phi0)| < 1";
        throw ConfigError(os.str());
    }
    int clamped = 0;
    if (params.potential.is_singular()) {
        const double lim = 1.0 - params.potential.eps_barrier();
        for (std::size_t k = 0; k < phi.size(); ++k) {
            if (!(std::abs(phi[k]) <= 1.0))
                throw ConfigError("initial phase violates |phi0| <= 1");
            if (std::abs(phi[k]) >= lim) {
                // one ulp inside the barrier so the potential never clamps
                phi[k] = std::copysign(std::nextafter(lim, 0.0), phi[k]);
                ++clamped;
            }
        }
    }
    if (clamped_cells)
        *clamped_cells = clamped;
    SimState s(phi.grid());
    s.v = v;
    s.v.zero_boundary_normal();
    s.phi = std::move(phi);
    s.sigma = sigma;
    s.mu = chemical_potential(params, s.phi, s.sigma);
    s.t = t;
    return s;
}

}  // namespace chns
