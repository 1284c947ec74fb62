#pragma once

#include "chns/errors.hpp"
#include "chns/grid.hpp"
#include "chns/potential.hpp"

#include <optional>
#include <vector>

namespace chns {

/// -B lap(u) + A Psi0'(u) = f with homogeneous Neumann data.
struct EllipticProblem {
    double A = 1.0;
    double B = 1.0;
    Potential potential = Potential::logarithmic(1.0, 1.0);
    ScalarField f;
    double tol_residual = 1e-10;
    int max_newton = 50;
};

struct EllipticSolution {
    ScalarField u;
    int newton_iters = 0;
    int linear_iters = 0;
    double final_residual = 0.0;
    /// Residual level below which rounding in Psi0'(u) dominates; convergence
    /// is declared at max(tol_residual, roundoff_floor).
    double roundoff_floor = 0.0;
    double margin = 0.0;
    std::vector<double> residual_history;
};

class EllipticSolveError : public SolverError {
public:
    EllipticSolveError(const std::string& what, ScalarField best, std::vector<double> history)
        : SolverError(what), best_iterate(std::move(best)), residual_history(std::move(history))
    {
    }
    ScalarField best_iterate;
    std::vector<double> residual_history;
};

/// Discrete residual -B lap(u) + A Psi0'(u) - f.
ScalarField elliptic_residual(const EllipticProblem& prob, const ScalarField& u);

/// Default initial guess clamp(mean(f) / (A theta), +-0.9), constant.
ScalarField default_initial_guess(const EllipticProblem& prob);

/// Damped Newton for the monotone map u -> -B lap(u) + A Psi0'(u).
///
/// Each Jacobian -B lap + A diag(Psi0''(u)) is symmetric positive definite
/// and is solved by diagonally preconditioned conjugate gradients to a
/// relative tolerance of 1e-2 tol_residual. Steps are halved until the
/// iterate stays strictly inside |u| < 1 - eps_barrier and the residual
/// decreases. Initial guesses outside 1 - 1e-8 are clamped.
EllipticSolution solve_singular_neumann(const EllipticProblem& prob,
                                        std::optional<ScalarField> u_init = std::nullopt);

/// 1 - max|u|.
double separation_margin(const ScalarField& u);

struct MarginFamilyEntry {
    double scale;
    double margin;
    double psi0_prime_linf;
    double data_norm;
    int newton_iters;
};

struct MarginFamilyReport {
    std::vector<MarginFamilyEntry> entries;
    bool all_positive = true;
};

/// Solves the problem with data scaled by each factor and reports margins
/// and max |Psi0'(u)| per member.
MarginFamilyReport margin_vs_data_bound(const EllipticProblem& base, const std::vector<double>& scales);

}  // namespace chns
