#include "chns/potential.hpp"

#include "chns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace chns {

namespace {

// (1-r)ln(1-r) + (1+r)ln(1+r) with 0 ln 0 = 0.
double entropy_term(double r)
{
    const double a = (r == 1.0) ? 0.0 : (1.0 - r) * std::log1p(-r);
    const double b = (r == -1.0) ? 0.0 : (1.0 + r) * std::log1p(r);
    return a + b;
}

}  // namespace

Potential::Potential(PotentialKind kind, double theta, double theta0, double eps_barrier)
    : kind_(kind), theta_(theta), theta0_(theta0), eps_barrier_(eps_barrier)
{
}

Potential Potential::logarithmic(double theta, double theta0, double eps_barrier)
{
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw ConfigError("(H2) logarithmic potential needs theta > 0");
    if (!std::isfinite(theta0))
        throw ConfigError("(H2) theta0 must be finite");
    if (!(eps_barrier > 0.0) || eps_barrier > 1e-6)
        throw ConfigError("eps_barrier must lie in (0, 1e-6]");
    return Potential(PotentialKind::logarithmic, theta, theta0, eps_barrier);
}

Potential Potential::quartic() { return Potential(PotentialKind::quartic, 1.0, 1.0, 1e-12); }

double Potential::clamp_arg(double r, ClampCounter* clamps) const
{
    if (kind_ == PotentialKind::quartic)
        return r;
    if (!(std::abs(r) < 1.0)) {
        std::ostringstream os;
        os << "logarithmic potential derivative evaluated at r = " << r;
        throw DomainError(os.str());
    }
    const double lim = 1.0 - eps_barrier_;
    if (std::abs(r) >= lim) {
        if (clamps)
            clamps->bump();
        return std::copysign(lim, r);
    }
    return r;
}

double Potential::psi(double r) const
{
    if (kind_ == PotentialKind::quartic) {
        const double s = 1.0 - r * r;
        return 0.25 * s * s;
    }
    if (!(std::abs(r) <= 1.0))
        throw DomainError("logarithmic potential evaluated outside [-1, 1]");
    return 0.5 * theta_ * entropy_term(r) + 0.5 * theta0_ * (1.0 - r * r);
}

double Potential::psi0(double r) const { return psi(r) + 0.5 * theta0_ * r * r; }

double Potential::psi0_prime(double r, ClampCounter* clamps) const
{
    r = clamp_arg(r, clamps);
    if (kind_ == PotentialKind::quartic)
        return r * r * r;
    return theta_ * std::atanh(r);
}

double Potential::psi0_second(double r, ClampCounter* clamps) const
{
    r = clamp_arg(r, clamps);
    if (kind_ == PotentialKind::quartic)
        return 3.0 * r * r;
    return theta_ / ((1.0 - r) * (1.0 + r));
}

double Potential::psi_prime(double r, ClampCounter* clamps) const
{
    const double rc = clamp_arg(r, clamps);
    return psi0_prime(rc) - theta0_ * rc;
}

double Potential::psi_second(double r, ClampCounter* clamps) const
{
    const double rc = clamp_arg(r, clamps);
    return psi0_second(rc) - theta0_;
}

double Potential::psi_third(double r, ClampCounter* clamps) const
{
    r = clamp_arg(r, clamps);
    if (kind_ == PotentialKind::quartic)
        return 6.0 * r;
    const double s = (1.0 - r) * (1.0 + r);
    return 2.0 * theta_ * r / (s * s);
}

bool Potential::admissible(double r) const
{
    if (kind_ == PotentialKind::quartic)
        return std::isfinite(r);
    return std::abs(r) < 1.0 - eps_barrier_;
}

double Potential::psi_min() const
{
    if (kind_ == PotentialKind::quartic)
        return 0.0;
    if (theta0_ <= theta_)
        return psi(0.0);
    // Positive root of atanh(r) = (theta0/theta) r by bisection on (0, 1).
    const double k = theta0_ / theta_;
    double lo = 0.0, hi = 1.0 - 1e-16;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (std::atanh(mid) < k * mid)
            lo = mid;
        else
            hi = mid;
    }
    return psi(0.5 * (lo + hi));
}

std::string Potential::describe() const
{
    std::ostringstream os;
    if (kind_ == PotentialKind::quartic)
        os << "quartic";
    else
        os << "logarithmic(theta=" << theta_ << ", theta0=" << theta0_ << ")";
    return os.str();
}

ConvexPart convex_part(const Potential& p)
{
    return ConvexPart{p.theta(), [p](double r) { return p.psi0_prime(r); },
                      [p](double r) { return p.psi0_second(r); }};
}

HypothesisReport validate_hypotheses(const ConvexPart& part, int n_samples, double eps0)
{
    if (n_samples < 100)
        throw ConfigError("validate_hypotheses needs at least 100 samples");
    HypothesisReport rep;
    const double theta = part.theta;
    rep.growth_bound = std::max({2.0 / theta, theta, 1.0});

    // Uniform samples plus tanh-clustered samples near the endpoints.
    const double edge = 1.0 - 1e-8;
    std::vector<double> rs;
    rs.reserve(2 * static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k)
        rs.push_back(-edge + 2.0 * edge * k / (n_samples - 1));
    const double smax = std::atanh(edge);
    for (int k = 0; k < n_samples; ++k)
        rs.push_back(std::tanh(-smax + 2.0 * smax * k / (n_samples - 1)));
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());

    std::vector<double> d1(rs.size()), d2(rs.size());
    for (std::size_t k = 0; k < rs.size(); ++k) {
        d1[k] = part.first(rs[k]);
        d2[k] = part.second(rs[k]);
    }

    auto fail = [&rep](double r, std::string what) {
        rep.passed = false;
        rep.violating_r = r;
        rep.failure = std::move(what);
        return rep;
    };

    for (std::size_t k = 0; k < rs.size(); ++k)
        if (!(d2[k] >= theta * (1.0 - 1e-12)))
            return fail(rs[k], "(H2) Psi0'' >= theta");

    const double slack = 1e-12;
    for (std::size_t k = 1; k < rs.size(); ++k) {
        if (rs[k - 1] >= 1.0 - eps0 && d2[k] < d2[k - 1] * (1.0 - slack))
            return fail(rs[k], "(H2) Psi0'' nondecreasing on [1-eps0, 1)");
        if (rs[k] <= -1.0 + eps0 && d2[k] > d2[k - 1] * (1.0 + slack))
            return fail(rs[k], "(H2) Psi0'' nonincreasing on (-1, -1+eps0]");
    }

    auto first_violation = [&](double c) -> std::optional<std::size_t> {
        for (std::size_t k = 0; k < rs.size(); ++k)
            if (d2[k] > c * std::exp(c * std::abs(d1[k])))
                return k;
        return std::nullopt;
    };
    if (auto k = first_violation(rep.growth_bound))
        return fail(rs[*k], "(H3) Psi0'' <= C exp(C |Psi0'|) with C <= max(2/theta, theta, 1)");
    double lo = 0.0, hi = rep.growth_bound;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (first_violation(mid))
            lo = mid;
        else
            hi = mid;
    }
    rep.min_growth_constant = hi;
    return rep;
}

HypothesisReport validate_hypotheses(const Potential& p, int n_samples)
{
    if (n_samples < 100)
        throw ConfigError("validate_hypotheses needs at least 100 samples");
    if (p.kind() == PotentialKind::quartic) {
        HypothesisReport rep;
        rep.trivial = true;
        rep.growth_bound = 1.0;
        rep.min_growth_constant = 0.0;
        return rep;
    }
    HypothesisReport rep = validate_hypotheses(convex_part(p), n_samples);
    if (p.theta0() <= p.theta())
        rep.warning = "theta0 <= theta: potential has no double-well structure";
    return rep;
}

}  // namespace chns
