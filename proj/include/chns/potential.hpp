#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace chns {

/// Counts evaluations that had to be clamped inward from +-1.
class ClampCounter {
public:
    void bump() { count_.fetch_add(1, std::memory_order_relaxed); }
    std::int64_t value() const { return count_.load(std::memory_order_relaxed); }
    void reset() { count_.store(0, std::memory_order_relaxed); }

private:
    std::atomic<std::int64_t> count_{0};
};

enum class PotentialKind { logarithmic, quartic };

/// Double-well potential Psi(r) = Psi0(r) - (theta0/2) r^2.
///
/// logarithmic: Psi(r) = theta/2 [(1-r)ln(1-r) + (1+r)ln(1+r)] + theta0/2 (1-r^2),
///              with 0 ln 0 = 0 at the endpoints; Psi0'' = theta/(1-r^2).
/// quartic:     Psi(r) = (1-r^2)^2/4 split as Psi0 = r^4/4 + 1/4, theta0 = 1;
///              defined on all of R.
class Potential {
public:
    static Potential logarithmic(double theta, double theta0, double eps_barrier = 1e-12);
    static Potential quartic();

    PotentialKind kind() const { return kind_; }
    double theta() const { return theta_; }
    double theta0() const { return theta0_; }
    double eps_barrier() const { return eps_barrier_; }
    bool is_singular() const { return kind_ == PotentialKind::logarithmic; }

    /// Psi(r); |r| <= 1 for the logarithmic kind (DomainError otherwise).
    double psi(double r) const;
    /// Convex part Psi0(r).
    double psi0(double r) const;

    // Derivatives require |r| < 1 for the logarithmic kind. Arguments within
    // eps_barrier of +-1 are evaluated at the clamped point and counted.
    double psi0_prime(double r, ClampCounter* clamps = nullptr) const;
    double psi0_second(double r, ClampCounter* clamps = nullptr) const;
    double psi_prime(double r, ClampCounter* clamps = nullptr) const;
    double psi_second(double r, ClampCounter* clamps = nullptr) const;
    double psi_third(double r, ClampCounter* clamps = nullptr) const;

    /// Whether a value is admissible as an iterate (strictly inside the barrier).
    bool admissible(double r) const;

    /// Smallest value of Psi on its domain (used for energy lower bounds).
    double psi_min() const;

    std::string describe() const;

private:
    Potential(PotentialKind kind, double theta, double theta0, double eps_barrier);
    double clamp_arg(double r, ClampCounter* clamps) const;

    PotentialKind kind_;
    double theta_;
    double theta0_;
    double eps_barrier_;
};

/// The convex-part derivatives a hypothesis check runs on. Separate from
/// Potential so tests can inject faulty functions.
struct ConvexPart {
    double theta;
    std::function<double(double)> first;   // Psi0'
    std::function<double(double)> second;  // Psi0''
};

ConvexPart convex_part(const Potential& p);

struct HypothesisReport {
    bool passed = true;
    bool trivial = false;           // no singular-potential hypotheses apply
    std::optional<double> violating_r;
    std::string failure;            // which hypothesis failed
    double min_growth_constant = 0.0;  // smallest C with Psi0'' <= C exp(C |Psi0'|)
    double growth_bound = 0.0;         // max(2/theta, theta, 1)
    std::string warning;            // e.g. theta0 <= theta: no double well
};

/// Samples (-1 + 1e-8, 1 - 1e-8) and checks Psi0'' >= theta, monotonicity of
/// Psi0'' near the endpoints on [1 - eps0, 1) and (-1, -1 + eps0], and the
/// exponential growth bound Psi0'' <= C exp(C |Psi0'|) with the smallest
/// admissible C reported. n_samples must be at least 100.
HypothesisReport validate_hypotheses(const ConvexPart& part, int n_samples, double eps0 = 0.5);
HypothesisReport validate_hypotheses(const Potential& p, int n_samples);

}  // namespace chns
