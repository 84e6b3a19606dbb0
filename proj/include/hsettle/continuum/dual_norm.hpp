#pragma once

// (H^1_0)* norm of a signed measure f on a padded box, p = 2:
//   |f|^2 = <f, u>,  (-Lap + 1) u = f,  u = 0 on the boundary.
// Discretized with trilinear (Q1) elements on a uniform node grid. Measures
// enter through their load vectors <f, phi_node>, which conserve total mass
// exactly when the support stays one cell away from the boundary. Stiffness and
// mass matrices are tensor products of 1-D tridiagonal Toeplitz matrices, so the
// solve is a single DST-I.

#include <array>
#include <cmath>
#include <vector>

#include "hsettle/continuum/transforms.hpp"
#include "hsettle/core/configuration.hpp"
#include "hsettle/kernels/quadrature.hpp"

namespace hsettle {

struct NodeGrid {
    AxisBox box;
    double h = 0.0;
    std::array<int, 3> n{}; // interior nodes per axis

    static NodeGrid make(const AxisBox& box, double h) {
        NodeGrid g;
        g.box = box;
        g.h = h;
        for (int k = 0; k < 3; ++k) {
            const double L = box.axes[k].length();
            const double c = std::round(L / h);
            if (c < 2.0 || std::abs(c * h - L) > 1e-9 * L) throw PreconditionError("box length not a multiple of h");
            g.n[k] = static_cast<int>(c) - 1;
        }
        return g;
    }

    /// Box `inner` padded by `pad` on every side.
    static NodeGrid covering(const AxisBox& inner, double pad, double h) {
        AxisBox b = inner;
        for (auto& a : b.axes) a = Interval{a.lo - pad, a.hi + pad};
        return make(b, h);
    }

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }
    std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(i) * n[1] + j) * n[2] + k; }
    double coord(int axis, int i) const { return box.axes[axis].lo + (i + 1) * h; }
};

/// Load vector <f, phi_node> of a signed measure.
struct GridMeasure {
    NodeGrid grid;
    std::vector<double> load;

    explicit GridMeasure(const NodeGrid& g) : grid(g), load(g.size(), 0.0) {}

    double mass() const {
        double s = 0.0;
        for (double v : load) s += v;
        return s;
    }

    /// Point mass w at x (trilinear weights).
    void add_atom(const Vec3& x, double w) {
        std::array<int, 3> base{};
        std::array<double, 3> t{};
        for (int a = 0; a < 3; ++a) {
            const double s = (x[a] - grid.box.axes[a].lo) / grid.h - 1.0; // interior index coordinate
            base[a] = static_cast<int>(std::floor(s));
            t[a] = s - base[a];
        }
        for (int c = 0; c < 8; ++c) {
            std::array<int, 3> idx{};
            double wt = w;
            for (int a = 0; a < 3; ++a) {
                const int bit = (c >> a) & 1;
                idx[a] = base[a] + bit;
                wt *= bit ? t[a] : 1.0 - t[a];
            }
            bool inside = true;
            for (int a = 0; a < 3; ++a) inside = inside && idx[a] >= 0 && idx[a] < grid.n[a];
            if (inside && wt != 0.0) load[grid.index(idx[0], idx[1], idx[2])] += wt;
        }
    }

    /// Mass w spread uniformly on the sphere |y - c| = R.
    void add_sphere_surface(const Vec3& c, double R, double w, const SphereRule& rule) {
        for (std::size_t q = 0; q < rule.dirs.size(); ++q) add_atom(c + R * rule.dirs[q], w * rule.w[q]);
    }

    /// Constant density `value` on `b` (exact hat integrals).
    void add_box(const AxisBox& b, double value) {
        std::array<std::vector<std::pair<int, double>>, 3> f;
        for (int a = 0; a < 3; ++a) {
            const double lo = (b.axes[a].lo - grid.box.axes[a].lo) / grid.h - 1.0;
            const double hi = (b.axes[a].hi - grid.box.axes[a].lo) / grid.h - 1.0;
            const int i0 = std::max(0, static_cast<int>(std::floor(lo)) - 1);
            const int i1 = std::min(grid.n[a] - 1, static_cast<int>(std::ceil(hi)) + 1);
            for (int i = i0; i <= i1; ++i) {
                const double v = grid.h * (hat_primitive(hi - i) - hat_primitive(lo - i));
                if (v != 0.0) f[a].push_back({i, v});
            }
        }
        for (const auto& [i, fi] : f[0]) {
            for (const auto& [j, fj] : f[1]) {
                for (const auto& [k, fk] : f[2]) load[grid.index(i, j, k)] += value * fi * fj * fk;
            }
        }
    }

private:
    // int_{-1}^{s} max(0, 1 - |t|) dt
    static double hat_primitive(double s) {
        if (s <= -1.0) return 0.0;
        if (s <= 0.0) return 0.5 * (s + 1.0) * (s + 1.0);
        if (s < 1.0) return 1.0 - 0.5 * (1.0 - s) * (1.0 - s);
        return 1.0;
    }
};

struct DualNormResult {
    double norm = 0.0;
    double pairing = 0.0; // <f, u>
    double energy = 0.0;  // u.(K + M)u by explicit stencils
    double residual = 0.0;
};

namespace detail {

// y += coefficient-weighted 1-D tridiagonal (diag, off) applied along `axis`
inline void apply_axis(const NodeGrid& g, const std::vector<double>& x, std::vector<double>& y, int axis, double diag,
                       double off) {
    for (int i = 0; i < g.n[0]; ++i) {
        for (int j = 0; j < g.n[1]; ++j) {
            for (int k = 0; k < g.n[2]; ++k) {
                std::array<int, 3> q{i, j, k};
                double v = diag * x[g.index(i, j, k)];
                for (int s : {-1, 1}) {
                    std::array<int, 3> r = q;
                    r[axis] += s;
                    if (r[axis] >= 0 && r[axis] < g.n[axis]) v += off * x[g.index(r[0], r[1], r[2])];
                }
                y[g.index(i, j, k)] = v;
            }
        }
    }
}

/// (K + M) u for the Q1 discretization of -Lap + 1.
inline std::vector<double> apply_screened(const NodeGrid& g, const std::vector<double>& u) {
    const double h = g.h;
    const double kd = 2.0 / h, ko = -1.0 / h, md = 4.0 * h / 6.0, mo = h / 6.0;
    std::vector<double> out(u.size(), 0.0), t1(u.size()), t2(u.size()), t3(u.size());
    // each term is a product of three commuting 1-D operators
    const std::array<std::array<bool, 3>, 4> stiff{{{true, false, false}, {false, true, false}, {false, false, true},
                                                    {false, false, false}}};
    for (const auto& term : stiff) {
        apply_axis(g, u, t1, 0, term[0] ? kd : md, term[0] ? ko : mo);
        apply_axis(g, t1, t2, 1, term[1] ? kd : md, term[1] ? ko : mo);
        apply_axis(g, t2, t3, 2, term[2] ? kd : md, term[2] ? ko : mo);
        for (std::size_t q = 0; q < u.size(); ++q) out[q] += t3[q];
    }
    return out;
}

} // namespace detail

inline DualNormResult dual_sobolev_norm(const GridMeasure& f) {
    const NodeGrid& g = f.grid;
    DualNormResult r;
    double fnorm = 0.0;
    for (double v : f.load) fnorm = std::max(fnorm, std::abs(v));
    if (fnorm == 0.0) return r;
    std::vector<double> u = f.load;
    SineTransform<3> st(g.n, {SineKind::node, SineKind::node, SineKind::node});
    const double h = g.h;
    st.solve(u, [&](const std::array<int, 3>& m) {
        std::array<double, 3> k{}, ms{};
        for (int a = 0; a < 3; ++a) {
            const double c = dirichlet_cos(SineKind::node, g.n[a], m[a]);
            k[a] = (2.0 - 2.0 * c) / h;
            ms[a] = h * (4.0 + 2.0 * c) / 6.0;
        }
        return k[0] * ms[1] * ms[2] + ms[0] * k[1] * ms[2] + ms[0] * ms[1] * k[2] + ms[0] * ms[1] * ms[2];
    });
    const auto Au = detail::apply_screened(g, u);
    double res = 0.0;
    for (std::size_t q = 0; q < u.size(); ++q) {
        res = std::max(res, std::abs(Au[q] - f.load[q]));
        r.pairing += f.load[q] * u[q];
        r.energy += u[q] * Au[q];
    }
    r.residual = res / fnorm;
    if (r.residual > 1e-10) throw IterativeFailure("screened Poisson solve inaccurate", r.residual);
    r.norm = std::sqrt(std::max(0.0, r.pairing));
    return r;
}

/// Load vectors of the empirical measures.
inline void add_rho(GridMeasure& g, const EmpiricalMeasures& m, double sign) {
    for (const auto& x : m.atoms) g.add_atom(x, sign * m.weight);
}
inline void add_rho_bar(GridMeasure& g, const EmpiricalMeasures& m, double sign, const SphereRule& rule) {
    for (const auto& x : m.atoms) g.add_sphere_surface(x, m.radius, sign * m.weight, rule);
}
inline void add_sigma(GridMeasure& g, const EmpiricalMeasures& m, double sign) {
    for (const auto& q : m.cubes) g.add_box(q.box(), sign * m.weight / q.volume());
}
inline void add_density(GridMeasure& g, const DensityField& n, double sign) {
    for (const auto& p : n.pieces) g.add_box(p.box, sign * p.value);
}

/// |rho_bar_N - sigma_N| and |sigma_N - n| on a grid with `per_cell` nodes per
/// N^{-1/3} spacing, padded by `pad` around the unit support hull.
struct NormPair {
    double rho_sigma = 0.0;
    double sigma_n = 0.0;
};

inline NormPair empirical_dual_norms(const ParticleConfiguration& c, const DensityField& n, int per_cell = 4,
                                     double pad = 0.25, int sphere_order = 8) {
    if (!c.has_cubes()) throw PreconditionError("dual norms need cubes");
    const double h = 1.0 / (c.scale() * per_cell);
    const NodeGrid g = NodeGrid::covering(n.support_hull(), pad, h);
    const auto m = EmpiricalMeasures::from(c);
    const SphereRule rule = product_sphere_rule(sphere_order);
    GridMeasure a(g), b(g);
    add_rho_bar(a, m, 1.0, rule);
    add_sigma(a, m, -1.0);
    add_sigma(b, m, 1.0);
    add_density(b, n, -1.0);
    return {dual_sobolev_norm(a).norm, dual_sobolev_norm(b).norm};
}

} // namespace hsettle
