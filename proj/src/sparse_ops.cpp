#include "chns/sparse_ops.hpp"

#include "chns/errors.hpp"

#include <array>

namespace chns {

namespace {

using Triplet = Eigen::Triplet<double>;

// Unified face id: x-faces first, then y-faces.
struct FaceTerm {
    long face;
    double coef;
};

// A linear strain functional g . v with quadrature weight.
struct Strain {
    double weight;
    std::array<FaceTerm, 4> terms;
    int count;
};

template <class Visitor>
void for_each_strain(const Grid& g, const ScalarField& eta, Visitor&& visit)
{
    const int nx = g.nx(), ny = g.ny();
    const double hx = g.hx(), hy = g.hy();
    const double area = g.cell_area();
    const long nxf = static_cast<long>(g.x_faces());
    auto xf = [&](int i, int j) { return static_cast<long>(g.x_face(i, j)); };
    auto yf = [&](int i, int j) { return nxf + static_cast<long>(g.y_face(i, j)); };

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double w = 2.0 * eta(i, j) * area;
            visit(Strain{w, {FaceTerm{xf(i + 1, j), 1.0 / hx}, FaceTerm{xf(i, j), -1.0 / hx}}, 2});
            visit(Strain{w, {FaceTerm{yf(i, j + 1), 1.0 / hy}, FaceTerm{yf(i, j), -1.0 / hy}}, 2});
        }

    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            double eta_sum = 0.0;
            int n_adj = 0;
            for (int dj = -1; dj <= 0; ++dj)
                for (int di = -1; di <= 0; ++di) {
                    const int ci = i + di, cj = j + dj;
                    if (ci >= 0 && ci < nx && cj >= 0 && cj < ny) {
                        eta_sum += eta(ci, cj);
                        ++n_adj;
                    }
                }
            const double wx_edge = (i == 0 || i == nx) ? 0.5 : 1.0;
            const double wy_edge = (j == 0 || j == ny) ? 0.5 : 1.0;
            const double weight = eta_sum / n_adj * area * wx_edge * wy_edge;

            Strain s{weight, {}, 0};
            // u_y: tangential to the walls y = 0, ly; x-faces i = 0, nx are boundary-normal (zero).
            if (i > 0 && i < nx) {
                if (j == 0)
                    s.terms[s.count++] = {xf(i, 0), 2.0 / hy};
                else if (j == ny)
                    s.terms[s.count++] = {xf(i, ny - 1), -2.0 / hy};
                else {
                    s.terms[s.count++] = {xf(i, j), 1.0 / hy};
                    s.terms[s.count++] = {xf(i, j - 1), -1.0 / hy};
                }
            }
            if (j > 0 && j < ny) {
                if (i == 0)
                    s.terms[s.count++] = {yf(0, j), 2.0 / hx};
                else if (i == nx)
                    s.terms[s.count++] = {yf(nx - 1, j), -2.0 / hx};
                else {
                    s.terms[s.count++] = {yf(i, j), 1.0 / hx};
                    s.terms[s.count++] = {yf(i - 1, j), -1.0 / hx};
                }
            }
            if (s.count > 0)
                visit(s);
        }
}

}  // namespace

SparseMatrix laplacian_matrix(const Grid& g)
{
    const int nx = g.nx(), ny = g.ny();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double ihy2 = 1.0 / (g.hy() * g.hy());
    std::vector<Triplet> trip;
    trip.reserve(g.cells() * 5);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const auto row = static_cast<int>(g.cell(i, j));
            double diag = 0.0;
            auto link = [&](int ci, int cj, double c) {
                trip.emplace_back(row, static_cast<int>(g.cell(ci, cj)), c);
                diag -= c;
            };
            if (i > 0)
                link(i - 1, j, ihx2);
            if (i < nx - 1)
                link(i + 1, j, ihx2);
            if (j > 0)
                link(i, j - 1, ihy2);
            if (j < ny - 1)
                link(i, j + 1, ihy2);
            trip.emplace_back(row, row, diag);
        }
    SparseMatrix m(static_cast<long>(g.cells()), static_cast<long>(g.cells()));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

SparseMatrix advection_matrix(const FaceField& v, FaceInterpolation interp)
{
    const Grid& g = v.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    std::vector<Triplet> trip;
    trip.reserve(g.cells() * 5);

    // Weights of (left, right) cell values in the face value.
    auto weights = [interp](double vel) -> std::pair<double, double> {
        if (interp == FaceInterpolation::upwind)
            return vel >= 0.0 ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
        return {0.5, 0.5};
    };
    // A face flux F = vel (a f_L + b f_R) leaves cell L and enters cell R.
    auto face = [&](int left, int right, double vel, double ih) {
        const auto [a, b] = weights(vel);
        trip.emplace_back(left, left, vel * a * ih);
        trip.emplace_back(left, right, vel * b * ih);
        trip.emplace_back(right, left, -vel * a * ih);
        trip.emplace_back(right, right, -vel * b * ih);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i)
            face(static_cast<int>(g.cell(i - 1, j)), static_cast<int>(g.cell(i, j)), v.u(i, j), ihx);
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            face(static_cast<int>(g.cell(i, j - 1)), static_cast<int>(g.cell(i, j)), v.w(i, j), ihy);
    SparseMatrix m(static_cast<long>(g.cells()), static_cast<long>(g.cells()));
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

Vector to_vector(const ScalarField& f)
{
    const auto vals = f.values();
    return Eigen::Map<const Vector>(vals.data(), static_cast<long>(vals.size()));
}

ScalarField to_field(const Grid& g, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != g.cells())
        throw GridMismatch("vector length does not match grid cells");
    return ScalarField(g, std::vector<double>(x.data(), x.data() + x.size()));
}

// ---------------------------------------------------------------- VelocityDofs

VelocityDofs::VelocityDofs(const Grid& g)
    : grid_(g),
      nu_(static_cast<std::size_t>(g.nx() - 1) * g.ny()),
      nw_(static_cast<std::size_t>(g.nx()) * (g.ny() - 1))
{
}

long VelocityDofs::u_dof(int i, int j) const
{
    if (i <= 0 || i >= grid_.nx())
        return -1;
    return static_cast<long>(j) * (grid_.nx() - 1) + (i - 1);
}

long VelocityDofs::w_dof(int i, int j) const
{
    if (j <= 0 || j >= grid_.ny())
        return -1;
    return static_cast<long>(nu_) + static_cast<long>(j - 1) * grid_.nx() + i;
}

Vector VelocityDofs::gather(const FaceField& v) const
{
    require_same_grid(grid_, v.grid());
    Vector x(static_cast<long>(size()));
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 1; i < grid_.nx(); ++i)
            x[u_dof(i, j)] = v.u(i, j);
    for (int j = 1; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i)
            x[w_dof(i, j)] = v.w(i, j);
    return x;
}

FaceField VelocityDofs::scatter(const Vector& x) const
{
    FaceField v(grid_);
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 1; i < grid_.nx(); ++i)
            v.u(i, j) = x[u_dof(i, j)];
    for (int j = 1; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i)
            v.w(i, j) = x[w_dof(i, j)];
    return v;
}

SparseMatrix viscous_matrix(const VelocityDofs& dofs, const ScalarField& eta)
{
    const Grid& g = dofs.grid();
    require_same_grid(g, eta.grid());
    const long nxf = static_cast<long>(g.x_faces());
    // Map unified face id to dof.
    std::vector<long> face_dof(g.x_faces() + g.y_faces(), -1);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i)
            face_dof[g.x_face(i, j)] = dofs.u_dof(i, j);
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            face_dof[nxf + g.y_face(i, j)] = dofs.w_dof(i, j);

    const double inv_area = 1.0 / g.cell_area();
    std::vector<Triplet> trip;
    trip.reserve(dofs.size() * 12);
    for_each_strain(g, eta, [&](const Strain& s) {
        for (int a = 0; a < s.count; ++a) {
            const long da = face_dof[s.terms[a].face];
            if (da < 0)
                continue;
            for (int b = 0; b < s.count; ++b) {
                const long db = face_dof[s.terms[b].face];
                if (db < 0)
                    continue;
                trip.emplace_back(da, db, s.weight * s.terms[a].coef * s.terms[b].coef * inv_area);
            }
        }
    });
    const auto n = static_cast<long>(dofs.size());
    SparseMatrix m(n, n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

double viscous_dissipation(const FaceField& v, const ScalarField& eta)
{
    const Grid& g = v.grid();
    require_same_grid(g, eta.grid());
    const long nxf = static_cast<long>(g.x_faces());
    const auto u = v.u_values();
    const auto w = v.w_values();
    double total = 0.0;
    for_each_strain(g, eta, [&](const Strain& s) {
        double gv = 0.0;
        for (int a = 0; a < s.count; ++a) {
            const long f = s.terms[a].face;
            gv += s.terms[a].coef * (f < nxf ? u[f] : w[f - nxf]);
        }
        total += s.weight * gv * gv;
    });
    return total;
}

FaceField momentum_convection(const FaceField& v)
{
    const Grid& g = v.grid();
    const int nx = g.nx(), ny = g.ny();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    FaceField out(g);

    // x-momentum at x-face (i, j): d(uu)/dx via cell centers, d(wu)/dy via nodes.
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double uc_r = 0.5 * (v.u(i, j) + v.u(i + 1, j));
            const double uc_l = 0.5 * (v.u(i - 1, j) + v.u(i, j));
            const double w_top = 0.5 * (v.w(i - 1, j + 1) + v.w(i, j + 1));
            const double w_bot = 0.5 * (v.w(i - 1, j) + v.w(i, j));
            const double u_top = 0.5 * (v.u(i, j) + v.u_ghost(i, j + 1));
            const double u_bot = 0.5 * (v.u_ghost(i, j - 1) + v.u(i, j));
            out.u(i, j) = (uc_r * uc_r - uc_l * uc_l) * ihx + (w_top * u_top - w_bot * u_bot) * ihy;
        }
    // y-momentum at y-face (i, j): d(uw)/dx via nodes, d(ww)/dy via cell centers.
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double wc_t = 0.5 * (v.w(i, j) + v.w(i, j + 1));
            const double wc_b = 0.5 * (v.w(i, j - 1) + v.w(i, j));
            const double u_right = 0.5 * (v.u(i + 1, j - 1) + v.u(i + 1, j));
            const double u_left = 0.5 * (v.u(i, j - 1) + v.u(i, j));
            const double w_right = 0.5 * (v.w(i, j) + v.w_ghost(i + 1, j));
            const double w_left = 0.5 * (v.w_ghost(i - 1, j) + v.w(i, j));
            out.w(i, j) = (u_right * w_right - u_left * w_left) * ihx + (wc_t * wc_t - wc_b * wc_b) * ihy;
        }
    return out;
}

}  // namespace chns
