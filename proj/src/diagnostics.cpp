#include "chns/diagnostics.hpp"

#include "chns/elliptic.hpp"
#include "chns/errors.hpp"
#include "chns/sparse_ops.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace chns {

double nutrient_weight(const PhysParams& p)
{
    const double lam = p.lam();
    if (lam == p.chi)
        return 1.0;
    if (lam == 0.0)
        throw ConfigError("energy weights chi/lambda need lambda != 0 when lambda differs from chi");
    return p.chi / lam;
}

double energy(const SimState& s, const PhysParams& p)
{
    const double w = nutrient_weight(p);
    const Grid& g = s.grid();
    double bulk = 0.0;
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
        const double phi = s.phi[k], sig = s.sigma[k];
        bulk += p.A * p.potential.psi(phi) + 0.5 * w * sig * sig + p.chi * sig * (1.0 - phi);
    }
    const FaceField gphi = gradient(s.phi);
    return kinetic_energy(s.v) + bulk * g.cell_area() + 0.5 * p.B * face_inner_product(gphi, gphi);
}

double dissipation(const SimState& s, const PhysParams& p)
{
    const double w = nutrient_weight(p);
    const double lam = p.lam();
    ScalarField eta(s.grid());
    ScalarField q(s.grid());
    for (std::size_t k = 0; k < eta.size(); ++k) {
        eta[k] = p.eta(s.phi[k]);
        q[k] = s.sigma[k] + lam * (1.0 - s.phi[k]);
    }
    const FaceField gmu = gradient(s.mu);
    const FaceField gq = gradient(q);
    return viscous_dissipation(s.v, eta) + face_inner_product(gmu, gmu) + w * face_inner_product(gq, gq);
}

double energy_source(const SimState& s, const PhysParams& p)
{
    const double w = nutrient_weight(p);
    const double lam = p.lam();
    const Grid& g = s.grid();
    const ScalarField src = p.source.sample(g, s.t);
    double total = 0.0;
    for (std::size_t k = 0; k < s.phi.size(); ++k) {
        const double phi = s.phi[k], sig = s.sigma[k];
        total += -p.alpha * (phi - p.c0) * s.mu[k] +
                 w * (-p.consumption * p.h(phi) * sig + src[k]) * (sig + lam * (1.0 - phi));
    }
    return total * g.cell_area();
}

double energy_law_residual(const SimState& prev, const SimState& next, const PhysParams& p, double dt)
{
    return (energy(next, p) - energy(prev, p)) / dt + dissipation(next, p) - energy_source(next, p);
}

double energy_lower_bound(const SimState& s, const PhysParams& p)
{
    const double w = nutrient_weight(p);
    ScalarField one_minus(s.grid());
    for (std::size_t k = 0; k < one_minus.size(); ++k)
        one_minus[k] = 1.0 - s.phi[k];
    const double sn = l2_norm(s.sigma);
    return p.A * s.grid().area() * p.potential.psi_min() + std::min(0.0, 0.5 * w) * sn * sn -
           std::abs(p.chi) * sn * l2_norm(one_minus);
}

DiagnosticsRecord make_record(const SimState& s, const PhysParams& p)
{
    DiagnosticsRecord r;
    r.step = s.step_index;
    r.t = s.t;
    r.E = energy(s, p);
    r.D = dissipation(s, p);
    r.phi_mean = mean(s.phi);
    r.sigma_mean = mean(s.sigma);
    r.margin = separation_margin(s.phi);
    r.div_linf = linf_norm(divergence(s.v));
    return r;
}

MeanLawReport analytic_mean_law_check(const std::vector<DiagnosticsRecord>& series, const PhysParams& p, double tol)
{
    MeanLawReport rep;
    if (series.empty())
        return rep;
    const double m0 = series.front().phi_mean;
    double factor = 1.0;
    for (std::size_t n = 1; n < series.size(); ++n) {
        factor /= 1.0 + p.alpha * series[n].dt;
        const double expected_dev = (m0 - p.c0) * factor;
        const double err = std::abs((series[n].phi_mean - p.c0) - expected_dev) /
                           std::max(std::abs(expected_dev), 1e-12);
        if (err > rep.max_recurrence_error) {
            rep.max_recurrence_error = err;
            rep.worst_step = series[n].step;
        }
    }
    const auto& last = series.back();
    const double exact = p.c0 + (m0 - p.c0) * std::exp(-p.alpha * (last.t - series.front().t));
    rep.final_continuous_error = std::abs(last.phi_mean - exact);
    rep.passed = rep.max_recurrence_error <= tol;
    return rep;
}

void write_csv_header(std::ostream& os)
{
    os << "step,t,dt,E,D,phi_mean,sigma_mean,margin,energy_residual,div_linf,ch_newton_iters,momentum_iters,"
          "poisson_iters,clamp_events\n";
}

void write_csv_row(std::ostream& os, const DiagnosticsRecord& r)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,%lld\n",
                  r.step, r.t, r.dt, r.E, r.D, r.phi_mean, r.sigma_mean, r.margin, r.energy_residual, r.div_linf,
                  r.ch_newton_iters, r.momentum_iters, r.poisson_iters, static_cast<long long>(r.clamp_events));
    os << buf;
}

}  // namespace chns
