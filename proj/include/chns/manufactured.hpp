#pragma once

#include "chns/model.hpp"
#include "chns/stepper.hpp"

namespace chns {

/// Smooth exact solution of the forced system on [0, lx] x [0, ly]:
///   phi   = 0.5 cos(kx x) cos(ky y) cos t
///   sigma = s0 + 0.4 cos(kx x) cos(2 ky y) cos t
///   v     = curl of (g(t)/pi) sin^2(kx x) sin^2(ky y),  g = 0.5 cos t
///   p     = 0
/// with kx = pi/lx, ky = pi/ly. All Neumann and no-slip conditions hold
/// exactly, so the forcings below carry the whole mismatch.
class Manufactured {
public:
    Manufactured(const PhysParams& params, double lx = 1.0, double ly = 1.0);

    double phi(double x, double y, double t) const;
    double sigma(double x, double y, double t) const;
    double mu(double x, double y, double t) const;
    double u(double x, double y, double t) const;
    double w(double x, double y, double t) const;
    double stream(double x, double y, double t) const;

    double force_phi(double x, double y, double t) const;
    double force_sigma(double x, double y, double t) const;
    double force_u(double x, double y, double t) const;
    double force_w(double x, double y, double t) const;

    ExternalForcing forcing() const;

    /// Exact data sampled on g at time t; v from the nodal stream function
    /// (exactly divergence-free), mu from the discrete chemical potential.
    SimState sample_state(const Grid& g, double t) const;

    const PhysParams& params() const { return p_; }
    static constexpr double sigma_offset = 0.3;

private:
    struct Flow {
        double u, ux, uy, uxx, uyy, ut;
        double w, wx, wy, wxx, wyy, wt;
    };
    Flow flow(double x, double y, double t) const;
    void phi_derivs(double x, double y, double t, double& f, double& fx, double& fy, double& ft) const;

    PhysParams p_;
    double lx_, ly_, kx_, ky_;
};

struct FieldErrors {
    double phi = 0.0;
    double sigma = 0.0;
    double velocity = 0.0;
};

/// Area-weighted l2 distances to the exact solution at s.t: point values for
/// phi and sigma, face fluxes of the stream function for v.
FieldErrors manufactured_errors(const Manufactured& m, const SimState& s);

/// Area-weighted l2 distances between two discrete states on the same grid.
FieldErrors state_differences(const SimState& a, const SimState& b);

}  // namespace chns
