#include "chns/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace chns {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double phi_amp = 0.5;
constexpr double sigma_amp = 0.4;
constexpr double flow_amp = 0.5;
}  // namespace

Manufactured::Manufactured(const PhysParams& params, double lx, double ly)
    : p_(params), lx_(lx), ly_(ly), kx_(pi / lx), ky_(pi / ly)
{
}

void Manufactured::phi_derivs(double x, double y, double t, double& f, double& fx, double& fy, double& ft) const
{
    const double cx = std::cos(kx_ * x), cy = std::cos(ky_ * y);
    const double sx = std::sin(kx_ * x), sy = std::sin(ky_ * y);
    f = phi_amp * cx * cy * std::cos(t);
    fx = -phi_amp * kx_ * sx * cy * std::cos(t);
    fy = -phi_amp * ky_ * cx * sy * std::cos(t);
    ft = -phi_amp * cx * cy * std::sin(t);
}

double Manufactured::phi(double x, double y, double t) const
{
    return phi_amp * std::cos(kx_ * x) * std::cos(ky_ * y) * std::cos(t);
}

double Manufactured::sigma(double x, double y, double t) const
{
    return sigma_offset + sigma_amp * std::cos(kx_ * x) * std::cos(2.0 * ky_ * y) * std::cos(t);
}

double Manufactured::mu(double x, double y, double t) const
{
    const double f = phi(x, y, t);
    const double k2 = kx_ * kx_ + ky_ * ky_;
    return p_.A * p_.potential.psi_prime(f) + p_.B * k2 * f - p_.chi * sigma(x, y, t);
}

double Manufactured::stream(double x, double y, double t) const
{
    const double sx = std::sin(kx_ * x), sy = std::sin(ky_ * y);
    return flow_amp * std::cos(t) / pi * sx * sx * sy * sy;
}

Manufactured::Flow Manufactured::flow(double x, double y, double t) const
{
    const double g = flow_amp * std::cos(t), gt = -flow_amp * std::sin(t);
    const double gu = ky_ / pi, gw = kx_ / pi;
    const double sx = std::sin(kx_ * x), sy = std::sin(ky_ * y);
    const double s2x = std::sin(2.0 * kx_ * x), c2x = std::cos(2.0 * kx_ * x);
    const double s2y = std::sin(2.0 * ky_ * y), c2y = std::cos(2.0 * ky_ * y);

    Flow f{};
    // u = g gu sin^2(kx x) sin(2 ky y)
    f.u = g * gu * sx * sx * s2y;
    f.ux = g * gu * kx_ * s2x * s2y;
    f.uy = g * gu * sx * sx * 2.0 * ky_ * c2y;
    f.uxx = g * gu * 2.0 * kx_ * kx_ * c2x * s2y;
    f.uyy = -g * gu * sx * sx * 4.0 * ky_ * ky_ * s2y;
    f.ut = gt * gu * sx * sx * s2y;
    // w = -g gw sin(2 kx x) sin^2(ky y)
    f.w = -g * gw * s2x * sy * sy;
    f.wx = -g * gw * 2.0 * kx_ * c2x * sy * sy;
    f.wy = -g * gw * s2x * ky_ * s2y;
    f.wxx = g * gw * 4.0 * kx_ * kx_ * s2x * sy * sy;
    f.wyy = -g * gw * s2x * 2.0 * ky_ * ky_ * c2y;
    f.wt = -gt * gw * s2x * sy * sy;
    return f;
}

double Manufactured::u(double x, double y, double t) const { return flow(x, y, t).u; }
double Manufactured::w(double x, double y, double t) const { return flow(x, y, t).w; }

double Manufactured::force_phi(double x, double y, double t) const
{
    double f, fx, fy, ft;
    phi_derivs(x, y, t, f, fx, fy, ft);
    const Flow v = flow(x, y, t);
    const double k2 = kx_ * kx_ + ky_ * ky_;
    const double lap_phi = -k2 * f;
    const double lap_sigma = -(kx_ * kx_ + 4.0 * ky_ * ky_) * (sigma(x, y, t) - sigma_offset);
    const Potential& pot = p_.potential;
    const double lap_mu = p_.A * (pot.psi_third(f) * (fx * fx + fy * fy) + pot.psi_second(f) * lap_phi) +
                          p_.B * k2 * lap_phi - p_.chi * lap_sigma;
    return ft + v.u * fx + v.w * fy - lap_mu + p_.alpha * (f - p_.c0);
}

double Manufactured::force_sigma(double x, double y, double t) const
{
    double f, fx, fy, ft;
    phi_derivs(x, y, t, f, fx, fy, ft);
    const Flow v = flow(x, y, t);
    const double cx = std::cos(kx_ * x), sx = std::sin(kx_ * x);
    const double c2y = std::cos(2.0 * ky_ * y), s2y = std::sin(2.0 * ky_ * y);
    const double s = sigma(x, y, t);
    const double st = -sigma_amp * cx * c2y * std::sin(t);
    const double sxd = -sigma_amp * kx_ * sx * c2y * std::cos(t);
    const double syd = -sigma_amp * 2.0 * ky_ * cx * s2y * std::cos(t);
    const double lap_sigma = -(kx_ * kx_ + 4.0 * ky_ * ky_) * (s - sigma_offset);
    const double lap_phi = -(kx_ * kx_ + ky_ * ky_) * f;
    return st + v.u * sxd + v.w * syd - lap_sigma + p_.lam() * lap_phi + p_.consumption * p_.h(f) * s -
           p_.source.eval(x, y, t);
}

double Manufactured::force_u(double x, double y, double t) const
{
    double f, fx, fy, ft;
    phi_derivs(x, y, t, f, fx, fy, ft);
    const Flow v = flow(x, y, t);
    const double deta = 0.5 * (p_.eta1 - p_.eta2);
    const double eta = p_.eta(f), etax = deta * fx, etay = deta * fy;
    const double shear = 0.5 * (v.uy + v.wx);
    const double visc = eta * (v.uxx + v.uyy) + 2.0 * (v.ux * etax + shear * etay);
    const double coupling = (mu(x, y, t) + p_.chi * sigma(x, y, t)) * fx;
    return v.ut + v.u * v.ux + v.w * v.uy - visc - coupling;
}

double Manufactured::force_w(double x, double y, double t) const
{
    double f, fx, fy, ft;
    phi_derivs(x, y, t, f, fx, fy, ft);
    const Flow v = flow(x, y, t);
    const double deta = 0.5 * (p_.eta1 - p_.eta2);
    const double eta = p_.eta(f), etax = deta * fx, etay = deta * fy;
    const double shear = 0.5 * (v.uy + v.wx);
    const double visc = eta * (v.wxx + v.wyy) + 2.0 * (shear * etax + v.wy * etay);
    const double coupling = (mu(x, y, t) + p_.chi * sigma(x, y, t)) * fy;
    return v.wt + v.u * v.wx + v.w * v.wy - visc - coupling;
}

ExternalForcing Manufactured::forcing() const
{
    ExternalForcing ext;
    ext.phi = [m = *this](double x, double y, double t) { return m.force_phi(x, y, t); };
    ext.sigma = [m = *this](double x, double y, double t) { return m.force_sigma(x, y, t); };
    ext.u = [m = *this](double x, double y, double t) { return m.force_u(x, y, t); };
    ext.w = [m = *this](double x, double y, double t) { return m.force_w(x, y, t); };
    return ext;
}

SimState Manufactured::sample_state(const Grid& g, double t) const
{
    MacVelocity v(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            v.u(i, j) = (stream(g.xn(i), g.yn(j + 1), t) - stream(g.xn(i), g.yn(j), t)) / g.hy();
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            v.w(i, j) = -(stream(g.xn(i + 1), g.yn(j), t) - stream(g.xn(i), g.yn(j), t)) / g.hx();
    const ScalarField phi = ScalarField::sample(g, [&](double x, double y) { return this->phi(x, y, t); });
    const ScalarField sig = ScalarField::sample(g, [&](double x, double y) { return sigma(x, y, t); });
    return make_state(p_, v, phi, sig, t);
}

FieldErrors manufactured_errors(const Manufactured& m, const SimState& s)
{
    // Velocity is compared with exact face fluxes (stream function differences),
    // the natural finite-volume reference on the staggered grid.
    const SimState exact = m.sample_state(s.grid(), s.t);
    return FieldErrors{l2_norm(s.phi - exact.phi), l2_norm(s.sigma - exact.sigma),
                       std::sqrt(face_inner_product(s.v - exact.v, s.v - exact.v))};
}

FieldErrors state_differences(const SimState& a, const SimState& b)
{
    const FaceField dv = a.v - b.v;
    return FieldErrors{l2_norm(a.phi - b.phi), l2_norm(a.sigma - b.sigma), std::sqrt(face_inner_product(dv, dv))};
}

}  // namespace chns
