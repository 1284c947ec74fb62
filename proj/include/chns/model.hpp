#pragma once

#include "chns/grid.hpp"
#include "chns/potential.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chns {

/// Nutrient source S(x, y, t).
struct SourceSpec {
    enum class Kind { zero, constant, gaussian_bump, tabulated };

    Kind kind = Kind::zero;
    double amplitude = 0.0;
    // gaussian_bump: amplitude * exp(-decay t) * exp(-|x - center|^2 / (2 width^2))
    double x0 = 0.5;
    double y0 = 0.5;
    double width = 0.1;
    double decay = 0.0;
    // tabulated: spatially uniform, piecewise linear in t, held constant outside the table
    std::vector<double> times;
    std::vector<double> values;

    double eval(double x, double y, double t) const;
    ScalarField sample(const Grid& g, double t) const;
    void validate() const;
};

std::string to_string(SourceSpec::Kind k);
SourceSpec::Kind source_kind_from_string(const std::string& s);

/// Model coefficients.
///
/// lambda defaults to chi, which recovers the nutrient flux grad(sigma + chi (1 - phi)).
struct PhysParams {
    double A = 1.0;
    double B = 1e-3;
    double chi = 0.0;
    std::optional<double> lambda;
    double alpha = 0.0;
    double c0 = 0.0;
    double consumption = 0.0;
    double eta1 = 1.0;
    double eta2 = 1.0;
    Potential potential = Potential::logarithmic(0.8, 1.0);
    SourceSpec source;

    double lam() const { return lambda.value_or(chi); }

    /// eta1 (1+r)/2 + eta2 (1-r)/2 with r clamped to [-1, 1].
    double eta(double phi) const;
    /// Interpolation (1+r)/2 clamped to [0, 1].
    double h(double phi) const;

    /// Throws ConfigError naming the violated hypothesis (H1), (H2) or (H5).
    void validate() const;
};

enum class Coupling { sequential, picard };

struct StepperConfig {
    double dt = 1e-3;
    /// Upper bound for adaptive growth; defaults to dt when unset.
    std::optional<double> dt_max;
    double dt_min = 1e-12;
    double cfl_max = 0.5;
    bool adapt_dt = false;
    double newton_tol = 1e-10;
    int max_newton = 50;
    double projection_tol = 1e-9;
    double linear_tol = 1e-12;
    Coupling coupling = Coupling::sequential;
    int picard_kmax = 1;
    double picard_tol = 1e-10;
    FaceInterpolation interp = FaceInterpolation::centered;
    bool solve_nutrient = true;
    bool solve_flow = true;

    void validate() const;
};

/// Snapshot of the discrete solution.
struct SimState {
    MacVelocity v;
    ScalarField p;
    ScalarField phi;
    ScalarField mu;
    ScalarField sigma;
    double t = 0.0;
    long step_index = 0;

    explicit SimState(const Grid& g) : v(g), p(g), phi(g), mu(g), sigma(g) {}
    const Grid& grid() const { return phi.grid(); }

    friend bool operator==(const SimState&, const SimState&) = default;
};

/// mu = A Psi'(phi) - B lap(phi) - chi sigma.
ScalarField chemical_potential(const PhysParams& p, const ScalarField& phi, const ScalarField& sigma,
                               ClampCounter* clamps = nullptr);

/// Builds a consistent state from (v, phi, sigma); mu from chemical_potential, p = 0.
/// Cells with |phi| = 1 exactly are moved inward by eps_barrier (singular kind).
/// Throws ConfigError when |mean(phi)| >= 1 or |phi| > 1 somewhere.
SimState make_state(const PhysParams& params, const MacVelocity& v, ScalarField phi, const ScalarField& sigma,
                    double t = 0.0, int* clamped_cells = nullptr);

}  // namespace chns
