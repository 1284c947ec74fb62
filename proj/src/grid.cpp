#include "chns/grid.hpp"

#include "chns/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace chns {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly)
{
    if (nx < 4 || ny < 4)
        throw ConfigError("grid needs at least 4x4 cells, got " + std::to_string(nx) + "x" +
                          std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw ConfigError("grid side lengths must be positive and finite");
}

void require_same_grid(const Grid& a, const Grid& b)
{
    if (!(a == b))
        throw GridMismatch("fields live on different grids");
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(const Grid& g, double value) : grid_(g), v_(g.cells(), value) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values))
{
    if (v_.size() != g.cells())
        throw GridMismatch("value count does not match grid cells");
}

ScalarField ScalarField::sample(const Grid& g, const std::function<double(double, double)>& f)
{
    ScalarField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out(i, j) = f(g.xc(i), g.yc(j));
    return out;
}

double ScalarField::with_ghost(int i, int j) const
{
    i = std::clamp(i, 0, grid_.nx() - 1);
    j = std::clamp(j, 0, grid_.ny() - 1);
    return (*this)(i, j);
}

ScalarField& ScalarField::operator+=(const ScalarField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < v_.size(); ++k)
        v_[k] += o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < v_.size(); ++k)
        v_[k] -= o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (auto& x : v_)
        x *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

// ------------------------------------------------------------------ FaceField

FaceField::FaceField(const Grid& g) : grid_(g), u_(g.x_faces(), 0.0), w_(g.y_faces(), 0.0) {}

FaceField FaceField::sample(const Grid& g,
                            const std::function<double(double, double)>& fu,
                            const std::function<double(double, double)>& fw)
{
    FaceField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i)
            out.u(i, j) = fu(g.xn(i), g.yc(j));
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out.w(i, j) = fw(g.xc(i), g.yn(j));
    return out;
}

void FaceField::zero_boundary_normal()
{
    for (int j = 0; j < grid_.ny(); ++j) {
        u(0, j) = 0.0;
        u(grid_.nx(), j) = 0.0;
    }
    for (int i = 0; i < grid_.nx(); ++i) {
        w(i, 0) = 0.0;
        w(i, grid_.ny()) = 0.0;
    }
}

double FaceField::u_ghost(int i, int j) const
{
    if (j < 0)
        return -u(i, 0);
    if (j >= grid_.ny())
        return -u(i, grid_.ny() - 1);
    return u(i, j);
}

double FaceField::w_ghost(int i, int j) const
{
    if (i < 0)
        return -w(0, j);
    if (i >= grid_.nx())
        return -w(grid_.nx() - 1, j);
    return w(i, j);
}

FaceField& FaceField::operator+=(const FaceField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < u_.size(); ++k)
        u_[k] += o.u_[k];
    for (std::size_t k = 0; k < w_.size(); ++k)
        w_[k] += o.w_[k];
    return *this;
}

FaceField& FaceField::operator-=(const FaceField& o)
{
    require_same_grid(grid_, o.grid_);
    for (std::size_t k = 0; k < u_.size(); ++k)
        u_[k] -= o.u_[k];
    for (std::size_t k = 0; k < w_.size(); ++k)
        w_[k] -= o.w_[k];
    return *this;
}

FaceField& FaceField::operator*=(double s)
{
    for (auto& x : u_)
        x *= s;
    for (auto& x : w_)
        x *= s;
    return *this;
}

FaceField operator-(FaceField a, const FaceField& b) { return a -= b; }
FaceField operator+(FaceField a, const FaceField& b) { return a += b; }
FaceField operator*(double s, FaceField a) { return a *= s; }

// ------------------------------------------------------------------ operators

FaceField gradient(const ScalarField& f)
{
    const Grid& g = f.grid();
    FaceField out(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i)
            out.u(i, j) = (f(i, j) - f(i - 1, j)) * ihx;
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out.w(i, j) = (f(i, j) - f(i, j - 1)) * ihy;
    return out;
}

ScalarField divergence(const FaceField& v)
{
    const Grid& g = v.grid();
    ScalarField out(g);
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out(i, j) = (v.u(i + 1, j) - v.u(i, j)) * ihx + (v.w(i, j + 1) - v.w(i, j)) * ihy;
    return out;
}

ScalarField laplacian_neumann(const ScalarField& f) { return divergence(gradient(f)); }

ScalarField advect_conservative(const FaceField& v, const ScalarField& f, FaceInterpolation interp)
{
    require_same_grid(v.grid(), f.grid());
    const Grid& g = f.grid();
    FaceField flux(g);
    auto face_value = [interp](double vel, double left, double right) {
        if (interp == FaceInterpolation::upwind)
            return vel >= 0.0 ? left : right;
        return 0.5 * (left + right);
    };
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 1; i < g.nx(); ++i) {
            const double vel = v.u(i, j);
            flux.u(i, j) = vel * face_value(vel, f(i - 1, j), f(i, j));
        }
    for (int j = 1; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const double vel = v.w(i, j);
            flux.w(i, j) = vel * face_value(vel, f(i, j - 1), f(i, j));
        }
    return divergence(flux);
}

double inner_product(const ScalarField& f, const ScalarField& g)
{
    require_same_grid(f.grid(), g.grid());
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        s += f[k] * g[k];
    return s * f.grid().cell_area();
}

double l2_norm(const ScalarField& f) { return std::sqrt(inner_product(f, f)); }

double linf_norm(const ScalarField& f)
{
    double m = 0.0;
    for (double x : f.values())
        m = std::max(m, std::abs(x));
    return m;
}

double integral(const ScalarField& f)
{
    const auto vals = f.values();
    return std::accumulate(vals.begin(), vals.end(), 0.0) * f.grid().cell_area();
}

double mean(const ScalarField& f)
{
    const auto vals = f.values();
    return std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
}

double face_inner_product(const FaceField& a, const FaceField& b)
{
    require_same_grid(a.grid(), b.grid());
    double s = 0.0;
    const auto au = a.u_values(), bu = b.u_values();
    const auto aw = a.w_values(), bw = b.w_values();
    for (std::size_t k = 0; k < au.size(); ++k)
        s += au[k] * bu[k];
    for (std::size_t k = 0; k < aw.size(); ++k)
        s += aw[k] * bw[k];
    return s * a.grid().cell_area();
}

double kinetic_energy(const FaceField& v) { return 0.5 * face_inner_product(v, v); }

double linf_norm(const FaceField& v)
{
    double m = 0.0;
    for (double x : v.u_values())
        m = std::max(m, std::abs(x));
    for (double x : v.w_values())
        m = std::max(m, std::abs(x));
    return m;
}

FaceField cell_to_faces(const ScalarField& f)
{
    const Grid& g = f.grid();
    FaceField out(g);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i)
            out.u(i, j) = 0.5 * (f.with_ghost(i - 1, j) + f.with_ghost(i, j));
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            out.w(i, j) = 0.5 * (f.with_ghost(i, j - 1) + f.with_ghost(i, j));
    return out;
}

}  // namespace chns
