#pragma once

// Closed-form volume potentials of a uniform box, evaluated through corner sums
// of primitive functions. With u = y - x running over the box corners and
// sign = prod(+1 at hi, -1 at lo):
//   newton  N(x)      = int_Q 1/|x-y| dy
//   hess_w  d_i d_j W, W(x) = int_Q |x-y| dy
//   hess_n  d_i d_j N (pointwise, inside and outside Q)
// Accurate near the box; for distances beyond ~10 box widths the corner sums
// cancel and quadrature should be used instead.

#include <array>
#include <cmath>
#include <limits>

#include "hsettle/core/geometry.hpp"

namespace hsettle {

struct BoxPotentials {
    double newton = 0.0;
    Mat3 hess_w = Mat3::Zero();
    Mat3 hess_n = Mat3::Zero();
};

namespace detail {

// ln(t + r) with r = sqrt(t^2 + rho2), stable for t < 0.
inline double log_plus(double t, double r, double rho2) {
    return t >= 0.0 ? std::log(t + r) : std::log(rho2 / (r - t));
}

inline double atan_term(double num, double den) { return den == 0.0 ? 0.0 : std::atan(num / den); }

} // namespace detail

inline BoxPotentials box_potentials(const Vec3& x, const AxisBox& box, bool with_hess_n = true) {
    BoxPotentials out;
    std::array<std::array<double, 2>, 3> u{}; // u[k][s]: s=0 lo, s=1 hi
    for (int k = 0; k < 3; ++k) {
        u[k][0] = box.axes[k].lo - x[k];
        u[k][1] = box.axes[k].hi - x[k];
    }
    double n = 0.0;
    std::array<double, 3> wdiag{0.0, 0.0, 0.0};
    std::array<double, 3> woff{0.0, 0.0, 0.0}; // (0,1), (0,2), (1,2)
    std::array<double, 3> ndiag{0.0, 0.0, 0.0};
    for (int s0 = 0; s0 < 2; ++s0) {
        for (int s1 = 0; s1 < 2; ++s1) {
            for (int s2 = 0; s2 < 2; ++s2) {
                const std::array<double, 3> v{u[0][s0], u[1][s1], u[2][s2]};
                const std::array<int, 3> sg{2 * s0 - 1, 2 * s1 - 1, 2 * s2 - 1};
                const double sign = static_cast<double>(sg[0] * sg[1] * sg[2]);
                const double r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                // ln(v_k + r) and atan(v_l v_m / (v_k r)) per axis k
                std::array<double, 3> L{}, A{};
                std::array<bool, 3> Lok{};
                for (int k = 0; k < 3; ++k) {
                    const int l = (k + 1) % 3, m = (k + 2) % 3;
                    const double rho2 = v[l] * v[l] + v[m] * v[m];
                    Lok[k] = rho2 > 0.0 || v[k] > 0.0;
                    L[k] = Lok[k] ? detail::log_plus(v[k], r, rho2) : 0.0;
                    A[k] = detail::atan_term(v[l] * v[m], v[k] * r);
                }
                // Newton potential primitive
                double F = 0.0;
                for (int k = 0; k < 3; ++k) {
                    const int l = (k + 1) % 3, m = (k + 2) % 3;
                    if (v[l] != 0.0 && v[m] != 0.0) F += v[l] * v[m] * L[k];
                    if (v[k] != 0.0) F -= 0.5 * v[k] * v[k] * A[k];
                }
                n += sign * F;
                // d_i d_i W: c G(v, w; c) with c = v_i
                for (int i = 0; i < 3; ++i) {
                    const double c = v[i];
                    if (c == 0.0) continue;
                    const int l = (i + 1) % 3, m = (i + 2) % 3;
                    double G = -c * A[i];
                    if (v[m] != 0.0) G += v[m] * L[l];
                    if (v[l] != 0.0) G += v[l] * L[m];
                    wdiag[i] += sign * c * G;
                    ndiag[i] -= sign * A[i];
                }
                // d_i d_j W: H1(t; rho^2) = (t r + rho^2 ln(t + r)) / 2 along the third axis
                for (int p = 0; p < 3; ++p) {
                    const int k = 2 - p; // (0,1)->2, (0,2)->1, (1,2)->0
                    const int i = (k + 1) % 3, j = (k + 2) % 3;
                    const double rho2 = v[i] * v[i] + v[j] * v[j];
                    double H = v[k] * r;
                    if (rho2 > 0.0) H += rho2 * L[k];
                    woff[p] += sign * 0.5 * H;
                }
            }
        }
    }
    out.newton = n;
    for (int i = 0; i < 3; ++i) out.hess_w(i, i) = wdiag[i];
    out.hess_w(0, 1) = out.hess_w(1, 0) = woff[0];
    out.hess_w(0, 2) = out.hess_w(2, 0) = woff[1];
    out.hess_w(1, 2) = out.hess_w(2, 1) = woff[2];

    if (with_hess_n) {
        for (int i = 0; i < 3; ++i) out.hess_n(i, i) = ndiag[i];
        // d_i d_j N = sum over the (i, j) corners of asinh(t/rho) differenced along k
        for (int p = 0; p < 3; ++p) {
            const int k = 2 - p;
            const int i = (k + 1) % 3, j = (k + 2) % 3;
            double acc = 0.0;
            for (int si = 0; si < 2; ++si) {
                for (int sj = 0; sj < 2; ++sj) {
                    const double a = u[i][si], b = u[j][sj];
                    const double s = static_cast<double>((2 * si - 1) * (2 * sj - 1));
                    const double rho = std::sqrt(a * a + b * b);
                    const double t1 = u[k][1], t0 = u[k][0];
                    double d;
                    if (rho > 0.0) {
                        d = std::asinh(t1 / rho) - std::asinh(t0 / rho);
                    } else if (t0 * t1 > 0.0) {
                        d = (t1 > 0.0 ? 1.0 : -1.0) * std::log(t1 / t0);
                    } else {
                        d = std::numeric_limits<double>::infinity(); // on an edge of the box
                    }
                    acc += s * d;
                }
            }
            out.hess_n(i, j) = out.hess_n(j, i) = acc;
        }
    }
    return out;
}

} // namespace hsettle
