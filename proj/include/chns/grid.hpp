#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace chns {

/// Uniform cell-centered grid on the rectangle [0, lx] x [0, ly].
///
/// Cell (i, j) has center ((i+1/2)hx, (j+1/2)hy). x-normal faces sit at
/// (i hx, (j+1/2)hy) for i = 0..nx, y-normal faces at ((i+1/2)hx, j hy) for
/// j = 0..ny. Nodes (cell corners) sit at (i hx, j hy).
class Grid {
public:
    Grid(int nx, int ny, double lx = 1.0, double ly = 1.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return lx_ / nx_; }
    double hy() const { return ly_ / ny_; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx_ * ly_; }

    std::size_t cells() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t x_faces() const { return static_cast<std::size_t>(nx_ + 1) * ny_; }
    std::size_t y_faces() const { return static_cast<std::size_t>(nx_) * (ny_ + 1); }

    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    std::size_t x_face(int i, int j) const { return static_cast<std::size_t>(j) * (nx_ + 1) + i; }
    std::size_t y_face(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }
    double xn(int i) const { return i * hx(); }
    double yn(int j) const { return j * hy(); }

    /// Same grid refined by `factor` in each direction.
    Grid refined(int factor = 2) const { return Grid(nx_ * factor, ny_ * factor, lx_, ly_); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
};

/// Cell-centered scalar with homogeneous Neumann boundary treatment.
class ScalarField {
public:
    explicit ScalarField(const Grid& g, double value = 0.0);
    ScalarField(const Grid& g, std::vector<double> values);

    /// Samples f(x, y) at cell centers.
    static ScalarField sample(const Grid& g, const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(int i, int j) { return v_[grid_.cell(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_.cell(i, j)]; }
    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }

    std::span<double> values() { return v_; }
    std::span<const double> values() const { return v_; }
    const std::vector<double>& vec() const { return v_; }

    /// Value of the reflected ghost neighbour; indices may be -1 or n.
    double with_ghost(int i, int j) const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid grid_;
    std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Face-normal vector field on the MAC grid: `u` on x-faces, `w` on y-faces.
///
/// Used both for face gradients of cell scalars and for the staggered
/// velocity. As a velocity the boundary-face normal components are zero
/// (no-penetration) and tangential no-slip is imposed through odd ghost
/// reflection u_ghost = -u_interior.
class FaceField {
public:
    explicit FaceField(const Grid& g);

    static FaceField sample(const Grid& g,
                            const std::function<double(double, double)>& fu,
                            const std::function<double(double, double)>& fw);

    const Grid& grid() const { return grid_; }

    double& u(int i, int j) { return u_[grid_.x_face(i, j)]; }
    double u(int i, int j) const { return u_[grid_.x_face(i, j)]; }
    double& w(int i, int j) { return w_[grid_.y_face(i, j)]; }
    double w(int i, int j) const { return w_[grid_.y_face(i, j)]; }

    std::span<double> u_values() { return u_; }
    std::span<const double> u_values() const { return u_; }
    std::span<double> w_values() { return w_; }
    std::span<const double> w_values() const { return w_; }

    /// Zeroes the boundary-normal components (no-penetration).
    void zero_boundary_normal();

    /// u with odd reflection across the walls y = 0, ly (j may be -1 or ny).
    double u_ghost(int i, int j) const;
    /// w with odd reflection across the walls x = 0, lx (i may be -1 or nx).
    double w_ghost(int i, int j) const;

    FaceField& operator+=(const FaceField& o);
    FaceField& operator-=(const FaceField& o);
    FaceField& operator*=(double s);

    friend bool operator==(const FaceField&, const FaceField&) = default;

private:
    Grid grid_;
    std::vector<double> u_;
    std::vector<double> w_;
};

using MacVelocity = FaceField;

FaceField operator+(FaceField a, const FaceField& b);
FaceField operator-(FaceField a, const FaceField& b);
FaceField operator*(double s, FaceField a);

enum class FaceInterpolation { centered, upwind };

void require_same_grid(const Grid& a, const Grid& b);

// Discrete operators. All are linear in their field argument(s) and use
// reflected ghosts so boundary fluxes vanish.

/// Centered face gradient; boundary-normal components are zero.
FaceField gradient(const ScalarField& f);
/// Cell flux balance of a face field.
ScalarField divergence(const FaceField& v);
/// 5-point Neumann Laplacian, identical to divergence(gradient(f)).
ScalarField laplacian_neumann(const ScalarField& f);
/// div(v f) with f interpolated to faces; zero net boundary flux.
ScalarField advect_conservative(const FaceField& v, const ScalarField& f,
                                FaceInterpolation interp = FaceInterpolation::centered);

double inner_product(const ScalarField& f, const ScalarField& g);
double l2_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);
double mean(const ScalarField& f);
/// Area-weighted sum over cells.
double integral(const ScalarField& f);

/// Sum of u^2 hx hy over x-faces plus w^2 hx hy over y-faces.
double face_inner_product(const FaceField& a, const FaceField& b);
double kinetic_energy(const FaceField& v);
double linf_norm(const FaceField& v);

/// Average of the two neighbouring cell values at each interior face;
/// boundary faces take the adjacent cell value.
FaceField cell_to_faces(const ScalarField& f);

}  // namespace chns
