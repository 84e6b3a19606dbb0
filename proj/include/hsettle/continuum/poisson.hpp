#pragma once

// Defect flow of a plane source in the duct (-1,1) x (0,1) x R. The forcing
// weight * delta_{x1=0} e3 does not depend on x3, so the flow is w(x1, x2) e3
// with -Lap w = weight * delta_{x1=0}, w = 0 on the cross-section boundary.

#include <gsl/gsl_sf_zeta.h>

#include <cmath>

#include "hsettle/continuum/grid.hpp"
#include "hsettle/continuum/transforms.hpp"

namespace hsettle {

/// 4 sum_{n odd} tanh(n pi)/(n pi)^3: E/weight^2 of the continuous problem.
/// With tanh = 1 the sum is (7/8) zeta(3) / pi^3; the first `terms` odd n carry
/// the tanh correction, beyond which it is below 1e-300.
inline double defect_series(int terms = 64) {
    double corr = 0.0;
    for (int k = terms - 1; k >= 0; --k) {
        const double a = (2 * k + 1) * kPi;
        corr += (std::tanh(a) - 1.0) / (a * a * a);
    }
    return 4.0 * (0.875 * gsl_sf_zeta_int(3) / (kPi * kPi * kPi) + corr);
}

/// Five-point solve on a node grid of spacing h = 1/cells_per_unit; the column
/// x1 = 0 is a grid column and carries weight/h per node.
inline GridSolution solve_defect_poisson(double weight, int cells_per_unit) {
    if (cells_per_unit < 2) throw PreconditionError("defect grid needs at least 2 cells per unit length");
    const double h = 1.0 / cells_per_unit;
    const int n1 = 2 * cells_per_unit - 1; // interior nodes in x1 over (-1, 1)
    const int n2 = cells_per_unit - 1;     // interior nodes in x2 over (0, 1)
    const int i0 = cells_per_unit - 1;     // interior index of x1 = 0
    if (n2 < 1) throw PreconditionError("defect grid too coarse");

    std::vector<double> f(static_cast<std::size_t>(n1) * n2, 0.0);
    for (int j = 0; j < n2; ++j) f[static_cast<std::size_t>(i0) * n2 + j] = weight / h;
    std::vector<double> u = f;
    SineTransform<2> st({n1, n2}, {SineKind::node, SineKind::node});
    st.solve(u, [&](const std::array<int, 2>& m) {
        return (dirichlet_symbol(SineKind::node, n1, m[0]) + dirichlet_symbol(SineKind::node, n2, m[1])) / (h * h);
    });

    auto at = [&](int i, int j) {
        if (i < 0 || i >= n1 || j < 0 || j >= n2) return 0.0;
        return u[static_cast<std::size_t>(i) * n2 + j];
    };
    double res = 0.0, fmax = 0.0, pair = 0.0;
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double lap = (4.0 * at(i, j) - at(i - 1, j) - at(i + 1, j) - at(i, j - 1) - at(i, j + 1)) / (h * h);
            const double fij = f[static_cast<std::size_t>(i) * n2 + j];
            res = std::max(res, std::abs(lap - fij));
            fmax = std::max(fmax, std::abs(fij));
            pair += fij * at(i, j) * h * h;
        }
    }
    GridSolution s;
    s.h = h;
    s.names = {"w"};
    s.shapes = {{n1, n2}};
    s.origins = {{-1.0 + h, h}};
    s.fields = {u};
    s.residual = fmax > 0.0 ? res / fmax : res;
    if (s.residual > 1e-10) throw IterativeFailure("defect Poisson solve inaccurate", s.residual);
    double line = 0.0;
    for (int j = 0; j < n2; ++j) line += at(i0, j);
    s.energy = weight * h * line;
    s.pairing = pair;
    return s;
}

/// Discrete Dirichlet energy of the defect solution: squared edge differences,
/// including the edges to boundary nodes.
inline double defect_dirichlet_energy(const GridSolution& s) {
    const int n1 = s.shapes[0][0], n2 = s.shapes[0][1];
    const auto& u = s.fields[0];
    auto at = [&](int i, int j) {
        if (i < 0 || i >= n1 || j < 0 || j >= n2) return 0.0;
        return u[static_cast<std::size_t>(i) * n2 + j];
    };
    double dir = 0.0;
    for (int i = -1; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) dir += std::pow(at(i + 1, j) - at(i, j), 2);
    }
    for (int i = 0; i < n1; ++i) {
        for (int j = -1; j < n2; ++j) dir += std::pow(at(i, j + 1) - at(i, j), 2);
    }
    return dir;
}

} // namespace hsettle
