#pragma once

#include "chns/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace chns {

struct DiagnosticsRecord {
    long step = 0;
    double t = 0.0;
    double dt = 0.0;
    double E = 0.0;
    double D = 0.0;
    double phi_mean = 0.0;
    double sigma_mean = 0.0;
    double margin = 0.0;
    double energy_residual = 0.0;
    double div_linf = 0.0;
    int ch_newton_iters = 0;
    int momentum_iters = 0;
    int poisson_iters = 0;
    std::int64_t clamp_events = 0;
};

/// Weight of the nutrient terms: chi/lambda, or 1 when lambda == chi
/// (including chi = lambda = 0). Throws ConfigError for lambda = 0 != chi.
double nutrient_weight(const PhysParams& p);

/// E = 1/2|v|^2 + int [A Psi(phi) + B/2 |grad phi|^2 + w/2 sigma^2 + chi sigma (1 - phi)]
/// with w = nutrient_weight; grad phi on faces, as in the solver.
double energy(const SimState& s, const PhysParams& p);

/// D = int 2 eta(phi)|Dv|^2 + |grad mu|^2 + w |grad(sigma + lambda(1 - phi))|^2.
double dissipation(const SimState& s, const PhysParams& p);

/// int [-alpha (phi - c0) mu + w (-C h(phi) sigma + S)(sigma + lambda(1 - phi))] at s.t.
double energy_source(const SimState& s, const PhysParams& p);

/// (E(next) - E(prev))/dt + D(next) - source(next).
double energy_law_residual(const SimState& prev, const SimState& next, const PhysParams& p, double dt);

/// A|Omega| min Psi - |chi| ||sigma|| ||1 - phi|| - |w|-weighted floor; E never drops below it.
double energy_lower_bound(const SimState& s, const PhysParams& p);

DiagnosticsRecord make_record(const SimState& s, const PhysParams& p);

struct MeanLawReport {
    bool passed = true;
    double max_recurrence_error = 0.0;  // relative, |phi_mean_n - exact recurrence|
    long worst_step = -1;
    double final_continuous_error = 0.0;  // |phi_mean(T) - (c0 + (m0 - c0) e^{-alpha T})|
};

/// Checks phi_mean_n = c0 + (m0 - c0)/(1 + alpha dt)^n along a fixed-dt series.
/// Relative errors are taken against max(|expected deviation from c0|, 1e-12).
MeanLawReport analytic_mean_law_check(const std::vector<DiagnosticsRecord>& series, const PhysParams& p,
                                      double tol = 1e-10);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const DiagnosticsRecord& r);

}  // namespace chns
