// Discretization of the 1D field Hamiltonian with a spatial mass term
// c1(t,z) that blocks propagation outside the cavity.
//
// Coarse-graining over grid cells [z_j, z_{j+1}] turns the continuum
// Hamiltonian into an N-site quadratic system with nearest-neighbor coupling
// 1/d^2 and on-site term c1_j(t) = (1/d) Int c1(t,z) dz.  The lattice is a
// finite window with fixed (Dirichlet) ends; walls several cells deep damp
// the interior modes exponentially, so the truncation is benign.

#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "casimir/moore.hpp"
#include "casimir/quadratic.hpp"

namespace casimir {

struct WallProfile {
    // c1(t, z) >= 0, exactly zero inside the cavity
    std::function<double(double t, double z)> c1;
};

// Hard-step wall profile of height c_wall outside [l(t), r(t)].
inline WallProfile step_wall_profile(const MirrorTrajectory& traj, double c_wall) {
    if (c_wall < 0.0)
        throw invalid_argument_error("step_wall_profile: wall height must be >= 0");
    return WallProfile{[traj, c_wall](double t, double z) {
        return (z >= traj.left(t) && z <= traj.right(t)) ? 0.0 : c_wall;
    }};
}

namespace detail {

// Adaptive Simpson on one cell.  A width floor keeps step discontinuities
// from recursing forever; the leftover error there is O(jump * width_floor).
inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double fa, double fm, double fb, double tol,
                               double width_floor, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (std::abs(left + right - whole) < 15.0 * tol || (b - a) < width_floor)
        return left + right + (left + right - whole) / 15.0;
    if (depth <= 0) {
        std::ostringstream os;
        os << "coarse_grain: quadrature failed to converge on interval [" << a << ", "
           << b << "]";
        throw numerical_error(os.str());
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, width_floor, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, width_floor, depth - 1);
}

}  // namespace detail

// Cell averages c1_j = (1/d_j) Int_{z_j}^{z_{j+1}} c1(t,z) dz.
inline Vector coarse_grain(const WallProfile& profile, const Vector& grid_edges,
                           double t, double tol = 1e-11) {
    const int n = static_cast<int>(grid_edges.size()) - 1;
    if (n < 1) throw invalid_argument_error("coarse_grain: need at least one cell");
    for (int j = 0; j < n; ++j)
        if (!(grid_edges[j + 1] > grid_edges[j]))
            throw invalid_argument_error("coarse_grain: grid must be strictly increasing");

    Vector out(n);
    for (int j = 0; j < n; ++j) {
        const double a = grid_edges[j], b = grid_edges[j + 1];
        auto f = [&](double z) {
            const double v = profile.c1(t, z);
            if (v < 0.0)
                throw invalid_argument_error("coarse_grain: c1 must be nonnegative");
            return v;
        };
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double scale = std::max({1.0, fa, fm, fb}) * (b - a);
        out[j] = detail::adaptive_simpson(f, a, b, fa, fm, fb, tol * scale,
                                          1e-12 * (b - a), 60) /
                 (b - a);
    }
    return out;
}

struct DiscreteFieldSystem {
    Vector grid_edges;
    WallProfile profile;
    QuadraticSystem system;  // mass 1, K(t) built from the cell averages

    Vector cell_averages(double t) const { return coarse_grain(profile, grid_edges, t); }
};

// Discretized field Hamiltonian on the given grid (fixed ends beyond the
// window).  Equidistant grids give the d^-2 nearest-neighbor stencil; uneven
// grids replace it per bond using center-to-center distances.
inline DiscreteFieldSystem build_hd(const WallProfile& profile, const Vector& grid_edges) {
    const int n = static_cast<int>(grid_edges.size()) - 1;
    if (n < 3) throw invalid_argument_error("build_hd: need at least 3 cells");
    for (int j = 0; j < n; ++j)
        if (!(grid_edges[j + 1] > grid_edges[j]))
            throw invalid_argument_error("build_hd: grid must be strictly increasing");

    Vector widths(n);
    for (int j = 0; j < n; ++j) widths[j] = grid_edges[j + 1] - grid_edges[j];

    auto stiffness = [profile, grid_edges, widths, n](double t) {
        Vector c1 = coarse_grain(profile, grid_edges, t);
        Matrix K = Matrix::Zero(n, n);
        for (int j = 0; j < n; ++j) K(j, j) = c1[j];
        for (int j = 0; j + 1 < n; ++j) {
            const double d_bond = 0.5 * (widths[j] + widths[j + 1]);
            const double off = 1.0 / (std::sqrt(widths[j] * widths[j + 1]) * d_bond);
            K(j, j + 1) -= off;
            K(j + 1, j) -= off;
            K(j, j) += 1.0 / (widths[j] * d_bond);
            K(j + 1, j + 1) += 1.0 / (widths[j + 1] * d_bond);
        }
        // fixed ends: bond to a clamped ghost cell of equal width
        K(0, 0) += 1.0 / (widths[0] * widths[0]);
        K(n - 1, n - 1) += 1.0 / (widths[n - 1] * widths[n - 1]);
        return K;
    };

    DiscreteFieldSystem sys;
    sys.grid_edges = grid_edges;
    sys.profile = profile;
    sys.system = QuadraticSystem{n, 1.0, std::move(stiffness)};
    return sys;
}

// Equidistant grid edges covering [z0, z1] with n cells.
inline Vector uniform_grid(double z0, double z1, int n_cells) {
    if (!(z1 > z0) || n_cells < 1)
        throw invalid_argument_error("uniform_grid: bad interval or cell count");
    Vector edges(n_cells + 1);
    for (int j = 0; j <= n_cells; ++j) edges[j] = z0 + (z1 - z0) * j / double(n_cells);
    return edges;
}

// Grid for a cavity [l0, r0] padded with wall_cells cells of the same width
// on each side (the wall holds its value well past the decay length).
inline Vector cavity_grid(double l0, double r0, int cavity_cells, int wall_cells = 8) {
    const double d = (r0 - l0) / cavity_cells;
    return uniform_grid(l0 - wall_cells * d, r0 + wall_cells * d,
                        cavity_cells + 2 * wall_cells);
}

}  // namespace casimir
