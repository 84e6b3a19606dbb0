#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hsettle/core/error.hpp"
#include "hsettle/core/geometry.hpp"

namespace hsettle {

/// N particles of radius R = N^{-1/3} r in a container, optionally with one
/// cube Q_i per particle. `transport_cells` are the mass cells moved onto each
/// atom when bounding W_inf (they default to the cubes).
struct ParticleConfiguration {
    std::string generator = "custom";
    double r = 0.0;
    double separation_c = 0.0; // declared constant in min|X_i - X_j| >= c N^{-1/3}
    std::vector<Vec3> centers;
    Domain domain = Domain::unit_cube();
    std::vector<Cube> cubes;
    std::vector<AxisBox> transport_cells;
    Vec3 translation = Vec3::Zero(); // lattice offset, always zero here

    std::size_t N() const { return centers.size(); }
    double scale() const { return std::cbrt(static_cast<double>(N())); } // N^{1/3}
    double radius() const { return r / scale(); }
    bool has_cubes() const { return !cubes.empty(); }

    /// Throws GeometryError / PreconditionError if the stored invariants fail.
    void validate(double cube_volume_factor = 64.0) const {
        if (centers.empty()) throw PreconditionError("configuration has no particles");
        if (!(r > 0.0)) throw PreconditionError("radius ratio must be positive");
        const double R = radius();
        for (const auto& x : centers) {
            if (!domain.contains_ball(x, R)) throw GeometryError("ball not strictly inside domain");
        }
        if (!has_cubes()) return;
        if (cubes.size() != N()) throw GeometryError("cube count differs from particle count");
        const double n = static_cast<double>(N());
        for (std::size_t i = 0; i < N(); ++i) {
            const Cube& q = cubes[i];
            if ((q.center - centers[i]).norm() > 1e-12 * (1.0 + centers[i].norm())) {
                throw GeometryError("cube not centered at its particle");
            }
            const double v = q.volume();
            if (v < 1.0 / (cube_volume_factor * n) || v > cube_volume_factor / n) {
                throw GeometryError("cube volume outside [1/(C N), C/N]");
            }
        }
        // cubes are axis-aligned: a sort along x1 keeps the disjointness scan near-linear
        std::vector<std::size_t> order(N());
        for (std::size_t i = 0; i < N(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return cubes[a].lo(0) < cubes[b].lo(0); });
        double hmax = 0.0;
        for (const auto& q : cubes) hmax = std::max(hmax, q.half_width);
        for (std::size_t a = 0; a < order.size(); ++a) {
            const Cube& qa = cubes[order[a]];
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                const Cube& qb = cubes[order[b]];
                if (qb.lo(0) >= qa.hi(0) + 2.0 * hmax) break;
                if (!qa.interior_disjoint(qb)) throw GeometryError("cubes overlap");
            }
        }
    }
};

/// Plane source g = weight * delta_{x_axis = position}, restricted to the
/// transverse interval `span` of the other cross-section axis.
struct PlaneDefect {
    int axis = 0;
    double position = 0.0;
    double weight = 0.0;
    Interval span{0.0, 1.0};
};

/// Piecewise-constant density: a sum of box indicators with values.
struct DensityField {
    struct Piece {
        AxisBox box;
        double value = 0.0;
    };
    std::vector<Piece> pieces;
    Domain domain = Domain::unit_cube();
    std::optional<PlaneDefect> defect;

    static DensityField uniform(const AxisBox& support, const Domain& domain) {
        DensityField d;
        d.domain = domain;
        d.pieces.push_back({support, 1.0 / support.volume()});
        return d;
    }

    double operator()(const Vec3& x) const {
        double s = 0.0;
        for (const auto& p : pieces) {
            if (p.box.contains(x)) s += p.value;
        }
        return s;
    }

    double total_mass() const {
        double m = 0.0;
        for (const auto& p : pieces) m += p.value * p.box.volume();
        return m;
    }

    AxisBox support_hull() const {
        if (pieces.empty()) throw PreconditionError("empty density");
        AxisBox b = pieces.front().box;
        for (const auto& p : pieces) {
            for (int k = 0; k < 3; ++k) {
                b.axes[k].lo = std::min(b.axes[k].lo, p.box.axes[k].lo);
                b.axes[k].hi = std::max(b.axes[k].hi, p.box.axes[k].hi);
            }
        }
        return b;
    }

    /// True when n depends on x3 alone inside the domain, i.e. every jump
    /// surface is orthogonal to e3. Checked on the arrangement of all piece
    /// faces: each x3-slab must carry a single value over the whole cross-section.
    bool hom_flag() const {
        std::array<std::vector<double>, 3> cuts;
        for (int k = 0; k < 2; ++k) {
            cuts[k] = {domain.extents[k].lo, domain.extents[k].hi};
        }
        for (const auto& p : pieces) {
            for (int k = 0; k < 3; ++k) {
                for (double t : {p.box.axes[k].lo, p.box.axes[k].hi}) {
                    if (k == 2 || domain.extents[k].contains(t)) cuts[k].push_back(t);
                }
            }
        }
        for (auto& c : cuts) {
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
        }
        for (std::size_t c3 = 0; c3 + 1 < cuts[2].size(); ++c3) {
            const double z = 0.5 * (cuts[2][c3] + cuts[2][c3 + 1]);
            bool first = true;
            double ref = 0.0;
            for (std::size_t c1 = 0; c1 + 1 < cuts[0].size(); ++c1) {
                for (std::size_t c2 = 0; c2 + 1 < cuts[1].size(); ++c2) {
                    const Vec3 x{0.5 * (cuts[0][c1] + cuts[0][c1 + 1]), 0.5 * (cuts[1][c2] + cuts[1][c2 + 1]), z};
                    const double v = (*this)(x);
                    if (first) {
                        ref = v;
                        first = false;
                    } else if (std::abs(v - ref) > 1e-12 * (1.0 + std::abs(ref))) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    void validate() const {
        if (std::abs(total_mass() - 1.0) > 1e-12) throw PreconditionError("density mass differs from 1");
        for (const auto& p : pieces) {
            for (int k = 0; k < 3; ++k) {
                if (!domain.bounded(k)) continue;
                if (p.box.axes[k].lo < domain.extents[k].lo - 1e-12 || p.box.axes[k].hi > domain.extents[k].hi + 1e-12) {
                    throw DomainMismatch("density piece leaves the domain");
                }
            }
        }
    }
};

/// rho_N (atoms), rho_bar_N (sphere-surface measures) and sigma_N (cube
/// indicators), each particle carrying mass 1/N.
struct EmpiricalMeasures {
    std::vector<Vec3> atoms;
    double radius = 0.0;
    std::vector<Cube> cubes;
    double weight = 0.0;

    static EmpiricalMeasures from(const ParticleConfiguration& c) {
        return {c.centers, c.radius(), c.cubes, 1.0 / static_cast<double>(c.N())};
    }
    double mass_rho() const { return weight * static_cast<double>(atoms.size()); }
    double mass_rho_bar() const { return mass_rho(); }
    double mass_sigma() const {
        // each |Q|^{-1} 1_Q has unit mass
        return weight * static_cast<double>(cubes.size());
    }
};

} // namespace hsettle
