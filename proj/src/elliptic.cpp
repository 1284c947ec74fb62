#include "chns/elliptic.hpp"

#include "chns/errors.hpp"
#include "chns/sparse_ops.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chns {

ScalarField elliptic_residual(const EllipticProblem& prob, const ScalarField& u)
{
    require_same_grid(u.grid(), prob.f.grid());
    ScalarField r = laplacian_neumann(u);
    for (std::size_t k = 0; k < r.size(); ++k)
        r[k] = -prob.B * r[k] + prob.A * prob.potential.psi0_prime(u[k]) - prob.f[k];
    return r;
}

ScalarField default_initial_guess(const EllipticProblem& prob)
{
    const double guess = std::clamp(mean(prob.f) / (prob.A * prob.potential.theta()), -0.9, 0.9);
    return ScalarField(prob.f.grid(), guess);
}

namespace {

double roundoff_floor(const EllipticProblem& prob, const ScalarField& u)
{
    const Grid& g = u.grid();
    const double lap_norm = 4.0 * (1.0 / (g.hx() * g.hx()) + 1.0 / (g.hy() * g.hy()));
    double d2max = 0.0, umax = 0.0;
    for (double x : u.values()) {
        d2max = std::max(d2max, prob.potential.psi0_second(x));
        umax = std::max(umax, std::abs(x));
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double point = 8.0 * eps *
                         (prob.B * lap_norm * umax + prob.A * d2max * std::max(umax, 1e-300) +
                          linf_norm(prob.f) + 1.0);
    return point * std::sqrt(g.area());
}

}  // namespace

EllipticSolution solve_singular_neumann(const EllipticProblem& prob, std::optional<ScalarField> u_init)
{
    if (!(prob.A > 0.0) || !(prob.B > 0.0))
        throw ConfigError("elliptic problem needs A > 0 and B > 0");
    for (double x : prob.f.values())
        if (!std::isfinite(x))
            throw ConfigError("elliptic data f is not finite");

    const Grid& g = prob.f.grid();
    const Potential& pot = prob.potential;
    ScalarField u = u_init ? *u_init : default_initial_guess(prob);
    require_same_grid(g, u.grid());
    const double start_limit = 1.0 - 1e-8;
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = std::clamp(u[k], -start_limit, start_limit);

    const SparseMatrix lap = laplacian_matrix(g);
    SparseMatrix base = -prob.B * lap;
    base.makeCompressed();

    EllipticSolution sol{u, 0, 0, 0.0, 0.0, 0.0, {}};
    ScalarField res = elliptic_residual(prob, u);
    double rnorm = l2_norm(res);
    sol.residual_history.push_back(rnorm);

    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(1e-2 * prob.tol_residual);
    cg.setMaxIterations(static_cast<long>(10 * g.cells()));

    for (int it = 0;; ++it) {
        const double floor = roundoff_floor(prob, u);
        if (rnorm <= std::max(prob.tol_residual, floor)) {
            sol.u = u;
            sol.newton_iters = it;
            sol.final_residual = rnorm;
            sol.roundoff_floor = floor;
            sol.margin = separation_margin(u);
            return sol;
        }
        if (it >= prob.max_newton) {
            std::ostringstream os;
            os << "singular Neumann Newton did not converge in " << prob.max_newton
               << " iterations (residual " << rnorm << ")";
            throw EllipticSolveError(os.str(), u, sol.residual_history);
        }

        SparseMatrix jac = base;
        for (std::size_t k = 0; k < u.size(); ++k)
            jac.coeffRef(static_cast<long>(k), static_cast<long>(k)) += prob.A * pot.psi0_second(u[k]);
        cg.compute(jac);
        const Vector delta = cg.solve(-to_vector(res));
        if (cg.info() != Eigen::Success && cg.info() != Eigen::NoConvergence)
            throw EllipticSolveError("linear solver breakdown in Newton step", u, sol.residual_history);
        sol.linear_iters += static_cast<int>(cg.iterations());

        double step = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            ScalarField trial = u;
            bool inside = true;
            for (std::size_t k = 0; k < u.size(); ++k) {
                trial[k] = u[k] + step * delta[static_cast<long>(k)];
                if (!pot.admissible(trial[k])) {
                    inside = false;
                    break;
                }
            }
            if (!inside)
                continue;
            ScalarField trial_res = elliptic_residual(prob, trial);
            const double trial_norm = l2_norm(trial_res);
            if (trial_norm < rnorm) {
                u = std::move(trial);
                res = std::move(trial_res);
                rnorm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << "damped Newton stalled at residual " << rnorm;
            throw EllipticSolveError(os.str(), u, sol.residual_history);
        }
        sol.residual_history.push_back(rnorm);
    }
}

double separation_margin(const ScalarField& u) { return 1.0 - linf_norm(u); }

MarginFamilyReport margin_vs_data_bound(const EllipticProblem& base, const std::vector<double>& scales)
{
    MarginFamilyReport rep;
    for (double s : scales) {
        EllipticProblem prob = base;
        prob.f = s * base.f;
        const EllipticSolution sol = solve_singular_neumann(prob);
        double dmax = 0.0;
        for (double x : sol.u.values())
            dmax = std::max(dmax, std::abs(prob.potential.psi0_prime(x)));
        rep.entries.push_back({s, sol.margin, dmax, l2_norm(prob.f), sol.newton_iters});
        if (!(sol.margin > 0.0))
            rep.all_positive = false;
    }
    return rep;
}

}  // namespace chns
