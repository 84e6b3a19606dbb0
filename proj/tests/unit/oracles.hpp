#pragma once

#include <algorithm>
#include <vector>

#include "hsettle/kernels/quadrature.hpp"

namespace oracle {

using hsettle::AxisBox;
using hsettle::GaussRule;
using hsettle::Interval;
using hsettle::Vec3;

// Integral over `box` for integrands singular (1/|y - x|) or kinked on the
// sphere |y - x| = kink at the apex x. The box is cut into six pyramids with
// apex x, one per face; y = x + t (p - x) with p on the face has Jacobian
// t^2 D (D the signed apex-to-face height), which removes the singularity, and
// the radial integral is split where |y - x| = kink.
template <class F>
double pyramid_gauss(F f, const AxisBox& box, const Vec3& x, int n, int sub, double kink = 0.0) {
    const GaussRule& g = hsettle::gauss_rule(n);
    double acc = 0.0;
    for (int k = 0; k < 3; ++k) {
        const int l = (k + 1) % 3, m = (k + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            const double face = side ? box.axes[k].hi : box.axes[k].lo;
            // pyramids from an exterior apex cancel outside the box
            const double D = side ? face - x[k] : x[k] - face;
            if (D == 0.0) continue;
            const Interval il = box.axes[l], im = box.axes[m];
            for (int a = 0; a < sub; ++a)
                for (int b = 0; b < sub; ++b) {
                    const double l0 = il.lo + il.length() * a / sub, l1 = il.lo + il.length() * (a + 1) / sub;
                    const double m0 = im.lo + im.length() * b / sub, m1 = im.lo + im.length() * (b + 1) / sub;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            Vec3 p;
                            p[k] = face;
                            p[l] = 0.5 * (l0 + l1) + 0.5 * (l1 - l0) * g.x[i];
                            p[m] = 0.5 * (m0 + m1) + 0.5 * (m1 - m0) * g.x[j];
                            const double wa = 0.25 * (l1 - l0) * (m1 - m0) * g.w[i] * g.w[j];
                            std::vector<double> cuts{0.0};
                            const double len = (p - x).norm();
                            if (kink > 0.0 && kink < len) cuts.push_back(kink / len);
                            cuts.push_back(1.0);
                            for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
                                const double t0 = cuts[c], t1 = cuts[c + 1];
                                for (int q = 0; q < n; ++q) {
                                    const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * g.x[q];
                                    acc += wa * 0.5 * (t1 - t0) * g.w[q] * t * t * D * f(Vec3(x + t * (p - x)));
                                }
                            }
                        }
                }
        }
    }
    return acc;
}

} // namespace oracle
