#pragma once

#include "chns/grid.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace chns {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

// Assembled counterparts of the stencil operators in grid.hpp, acting on
// cell vectors ordered like ScalarField storage. Patterns are fixed per grid
// (explicit zeros are kept) so symbolic factorizations can be reused.

SparseMatrix laplacian_matrix(const Grid& g);
SparseMatrix advection_matrix(const FaceField& v, FaceInterpolation interp);

Vector to_vector(const ScalarField& f);
ScalarField to_field(const Grid& g, const Vector& x);

/// Interior (unknown) velocity faces of the MAC grid; boundary-normal faces
/// are pinned to zero and carry no unknown.
class VelocityDofs {
public:
    explicit VelocityDofs(const Grid& g);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return nu_ + nw_; }
    std::size_t nu() const { return nu_; }

    /// Dof of x-face (i, j), or -1 for boundary faces.
    long u_dof(int i, int j) const;
    long w_dof(int i, int j) const;

    Vector gather(const FaceField& v) const;
    FaceField scatter(const Vector& x) const;

private:
    Grid grid_;
    std::size_t nu_;
    std::size_t nw_;
};

/// Viscous operator K with -div(2 eta D v) ~ K v on interior faces.
///
/// K is assembled as the Hessian of the discrete dissipation functional
/// (1/2) sum_c 2 eta_c (u_x^2 + w_y^2) |c| + (1/2) sum_n eta_n (u_y + w_x)^2 |n|
/// divided by the face area, so it is symmetric positive semidefinite and
/// v^T K v hx hy equals viscous_dissipation(v, eta). Node viscosities are
/// averages of the adjacent cells; wall nodes carry half weight, matching
/// odd ghost reflection of the tangential velocity.
SparseMatrix viscous_matrix(const VelocityDofs& dofs, const ScalarField& eta);

/// sum of 2 eta |D v|^2 over the domain with the same quadrature as viscous_matrix.
double viscous_dissipation(const FaceField& v, const ScalarField& eta);

/// Divergence-form convection div(v v) at interior faces, centered.
FaceField momentum_convection(const FaceField& v);

}  // namespace chns
