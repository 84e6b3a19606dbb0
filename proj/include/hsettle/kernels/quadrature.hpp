#pragma once

#include <gsl/gsl_integration.h>

#include <array>
#include <cmath>
#include <vector>

#include "hsettle/core/error.hpp"
#include "hsettle/core/geometry.hpp"

namespace hsettle {

/// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

inline constexpr int kMaxGaussOrder = 64;

inline const GaussRule& gauss_rule(int n) {
    if (n < 1 || n > kMaxGaussOrder) throw PreconditionError("Gauss order out of range");
    static const std::vector<GaussRule> table = [] {
        std::vector<GaussRule> t(kMaxGaussOrder + 1);
        for (int m = 1; m <= kMaxGaussOrder; ++m) {
            gsl_integration_glfixed_table* g = gsl_integration_glfixed_table_alloc(m);
            t[m].x.resize(m);
            t[m].w.resize(m);
            for (int i = 0; i < m; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &t[m].x[i], &t[m].w[i], g);
            gsl_integration_glfixed_table_free(g);
        }
        return t;
    }();
    return table[n];
}

/// Tensor Gauss rule of order n on `box`.
template <class F>
double integrate_box_gauss(F&& f, const AxisBox& box, int n) {
    const GaussRule& g = gauss_rule(n);
    std::array<double, 3> mid{}, half{};
    for (int k = 0; k < 3; ++k) {
        mid[k] = 0.5 * (box.axes[k].lo + box.axes[k].hi);
        half[k] = 0.5 * (box.axes[k].hi - box.axes[k].lo);
    }
    double s = 0.0;
    for (int a = 0; a < n; ++a) {
        double sb = 0.0;
        for (int b = 0; b < n; ++b) {
            double sc = 0.0;
            for (int c = 0; c < n; ++c) {
                const Vec3 y{mid[0] + half[0] * g.x[a], mid[1] + half[1] * g.x[b], mid[2] + half[2] * g.x[c]};
                sc += g.w[c] * f(y);
            }
            sb += g.w[b] * sc;
        }
        s += g.w[a] * sb;
    }
    return s * half[0] * half[1] * half[2];
}

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {

inline std::array<AxisBox, 8> split_box(const AxisBox& b) {
    std::array<AxisBox, 8> out;
    const Vec3 c = b.center();
    for (int i = 0; i < 8; ++i) {
        for (int k = 0; k < 3; ++k) {
            out[i].axes[k] = ((i >> k) & 1) ? Interval{c[k], b.axes[k].hi} : Interval{b.axes[k].lo, c[k]};
        }
    }
    return out;
}

template <class F>
QuadratureResult adaptive_box_rec(F& f, const AxisBox& box, double coarse, int n, double tol, int depth) {
    const auto kids = split_box(box);
    std::array<double, 8> fine{};
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) {
        fine[i] = integrate_box_gauss(f, kids[i], n);
        sum += fine[i];
    }
    const double err = std::abs(sum - coarse);
    if (err <= tol || depth <= 0) return {sum, err};
    QuadratureResult r;
    for (int i = 0; i < 8; ++i) {
        const auto sub = adaptive_box_rec(f, kids[i], fine[i], n, tol / 8.0, depth - 1);
        r.value += sub.value;
        r.error += sub.error;
    }
    return r;
}

} // namespace detail

/// Octree-adaptive tensor Gauss quadrature. Throws AccuracyError when the
/// estimated absolute error stays above `tol` after `max_depth` refinements.
template <class F>
QuadratureResult integrate_box_adaptive(F&& f, const AxisBox& box, int n, double tol, int max_depth) {
    const double coarse = integrate_box_gauss(f, box, n);
    QuadratureResult r = detail::adaptive_box_rec(f, box, coarse, n, tol, max_depth);
    if (r.error > tol) throw AccuracyError("adaptive box quadrature did not converge", r.error);
    return r;
}

/// Unit-sphere rule: directions with weights summing to 1.
struct SphereRule {
    std::vector<Vec3> dirs;
    std::vector<double> w;
};

/// 26-point rule (6 axes, 12 edge midpoints, 8 corners), exact to degree 7.
inline const SphereRule& lebedev26() {
    static const SphereRule rule = [] {
        SphereRule s;
        for (int k = 0; k < 3; ++k) {
            for (double sg : {1.0, -1.0}) {
                Vec3 d = Vec3::Zero();
                d[k] = sg;
                s.dirs.push_back(d);
                s.w.push_back(1.0 / 21.0);
            }
        }
        const double a = 1.0 / std::sqrt(2.0);
        for (int k = 0; k < 3; ++k) {
            for (double s1 : {1.0, -1.0}) {
                for (double s2 : {1.0, -1.0}) {
                    Vec3 d = Vec3::Zero();
                    d[(k + 1) % 3] = s1 * a;
                    d[(k + 2) % 3] = s2 * a;
                    s.dirs.push_back(d);
                    s.w.push_back(4.0 / 105.0);
                }
            }
        }
        const double b = 1.0 / std::sqrt(3.0);
        for (double s1 : {1.0, -1.0}) {
            for (double s2 : {1.0, -1.0}) {
                for (double s3 : {1.0, -1.0}) {
                    s.dirs.push_back(Vec3(s1 * b, s2 * b, s3 * b));
                    s.w.push_back(9.0 / 280.0);
                }
            }
        }
        return s;
    }();
    return rule;
}

/// Product rule: n Gauss nodes in cos(theta) times 2n equispaced azimuths.
/// Exact for spherical polynomials of degree <= 2n - 1.
inline SphereRule product_sphere_rule(int n) {
    const GaussRule& g = gauss_rule(n);
    SphereRule s;
    const int m = 2 * n;
    for (int a = 0; a < n; ++a) {
        const double ct = g.x[a];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int b = 0; b < m; ++b) {
            const double phi = 2.0 * kPi * (b + 0.5) / m;
            s.dirs.push_back(Vec3(st * std::cos(phi), st * std::sin(phi), ct));
            s.w.push_back(0.5 * g.w[a] / m);
        }
    }
    return s;
}

/// Average of f over the sphere |y - c| = R.
template <class F>
auto sphere_average(F&& f, const Vec3& c, double R, const SphereRule& rule) {
    using T = decltype(f(c));
    T acc = rule.w[0] * f(Vec3(c + R * rule.dirs[0]));
    for (std::size_t q = 1; q < rule.dirs.size(); ++q) acc += rule.w[q] * f(Vec3(c + R * rule.dirs[q]));
    return acc;
}

} // namespace hsettle
