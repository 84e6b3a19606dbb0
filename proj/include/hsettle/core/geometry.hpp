#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "hsettle/core/error.hpp"

namespace hsettle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    double overlap(const Interval& o) const {
        return std::max(0.0, std::min(hi, o.hi) - std::max(lo, o.lo));
    }
};

/// Axis-aligned box [lo_0,hi_0] x [lo_1,hi_1] x [lo_2,hi_2].
struct AxisBox {
    std::array<Interval, 3> axes{};

    double volume() const { return axes[0].length() * axes[1].length() * axes[2].length(); }
    Vec3 center() const {
        return {0.5 * (axes[0].lo + axes[0].hi), 0.5 * (axes[1].lo + axes[1].hi),
                0.5 * (axes[2].lo + axes[2].hi)};
    }
    double overlap_volume(const AxisBox& o) const {
        return axes[0].overlap(o.axes[0]) * axes[1].overlap(o.axes[1]) * axes[2].overlap(o.axes[2]);
    }
    bool contains(const Vec3& p) const {
        return axes[0].contains(p[0]) && axes[1].contains(p[1]) && axes[2].contains(p[2]);
    }
    /// Largest Euclidean distance from p to a point of the box (attained at a corner).
    double farthest_distance(const Vec3& p) const {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double d = std::max(std::abs(p[k] - axes[k].lo), std::abs(p[k] - axes[k].hi));
            s += d * d;
        }
        return std::sqrt(s);
    }
};

/// Axis-aligned cube, stored by center and half-width.
struct Cube {
    Vec3 center = Vec3::Zero();
    double half_width = 0.0;

    double side() const { return 2.0 * half_width; }
    double volume() const { return side() * side() * side(); }
    double lo(int k) const { return center[k] - half_width; }
    double hi(int k) const { return center[k] + half_width; }
    AxisBox box() const {
        return AxisBox{{Interval{lo(0), hi(0)}, Interval{lo(1), hi(1)}, Interval{lo(2), hi(2)}}};
    }
    /// Interiors are disjoint (shared faces allowed).
    bool interior_disjoint(const Cube& o, double tol = 1e-12) const {
        for (int k = 0; k < 3; ++k) {
            if (std::abs(center[k] - o.center[k]) >= half_width + o.half_width - tol) return true;
        }
        return false;
    }
    bool contains_ball(const Vec3& c, double radius, double tol = 1e-12) const {
        for (int k = 0; k < 3; ++k) {
            if (c[k] - radius < lo(k) - tol || c[k] + radius > hi(k) + tol) return false;
        }
        return true;
    }
    /// Euclidean distance from p to the closed cube (0 inside).
    double distance(const Vec3& p) const {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double d = std::max(0.0, std::abs(p[k] - center[k]) - half_width);
            s += d * d;
        }
        return std::sqrt(s);
    }
};

enum class DomainKind { box, duct };

/// Rectangular container. A duct is bounded in x1, x2 and unbounded along x3,
/// which is also the force axis.
struct Domain {
    DomainKind kind = DomainKind::box;
    std::array<Interval, 3> extents{};

    static Domain box(Interval a, Interval b, Interval c) {
        Domain d{DomainKind::box, {a, b, c}};
        d.validate();
        return d;
    }
    static Domain unit_cube() { return box({0, 1}, {0, 1}, {0, 1}); }
    static Domain duct(Interval a, Interval b) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        Domain d{DomainKind::duct, {a, b, Interval{-inf, inf}}};
        d.validate();
        return d;
    }

    void validate() const {
        if (!(extents[0].length() > 0.0) || !(extents[1].length() > 0.0)) {
            throw PreconditionError("domain cross-section must have positive measure");
        }
        if (!std::isfinite(extents[0].length()) || !std::isfinite(extents[1].length())) {
            throw PreconditionError("domain must be bounded orthogonal to its axis");
        }
        if (kind == DomainKind::box && !(extents[2].length() > 0.0 && std::isfinite(extents[2].length()))) {
            throw PreconditionError("box domain needs a finite positive third extent");
        }
    }

    bool bounded(int axis) const { return axis < 2 || kind == DomainKind::box; }

    double cross_section_area() const { return extents[0].length() * extents[1].length(); }

    /// Distance from p to the boundary (unbounded axis ignored); negative outside.
    double wall_distance(const Vec3& p) const {
        double d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            if (!bounded(k)) continue;
            d = std::min({d, p[k] - extents[k].lo, extents[k].hi - p[k]});
        }
        return d;
    }

    bool contains_ball(const Vec3& c, double radius) const { return wall_distance(c) > radius; }

    std::string kind_name() const { return kind == DomainKind::box ? "box" : "duct"; }
};

} // namespace hsettle
