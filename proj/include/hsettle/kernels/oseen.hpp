#pragma once

#include <cmath>

#include "hsettle/core/geometry.hpp"

namespace hsettle {

/// Stokeslet Phi(x) = (I/|x| + x x^T/|x|^3) / (8 pi), viscosity 1.
inline Mat3 oseen(const Vec3& x) {
    const double r2 = x.squaredNorm();
    if (!(r2 > 0.0)) throw SingularEvaluation("Oseen tensor evaluated at the origin");
    const double r = std::sqrt(r2);
    const double c = 1.0 / (8.0 * kPi * r);
    return c * (Mat3::Identity() + x * x.transpose() / r2);
}

/// Classical Laplacian of the Stokeslet away from the origin:
/// Delta Phi(x) = (I/|x|^3 - 3 x x^T/|x|^5) / (4 pi).
inline Mat3 oseen_laplacian(const Vec3& x) {
    const double r2 = x.squaredNorm();
    if (!(r2 > 0.0)) throw SingularEvaluation("Oseen Laplacian evaluated at the origin");
    const double r = std::sqrt(r2);
    const double c = 1.0 / (4.0 * kPi * r2 * r);
    return c * (Mat3::Identity() - 3.0 * x * x.transpose() / r2);
}

/// e3.Phi(x)e3 and e3.(Delta Phi)(x)e3 without forming the tensors.
inline double oseen33(const Vec3& x) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    return (1.0 + x[2] * x[2] / r2) / (8.0 * kPi * r);
}

inline double oseen_laplacian33(const Vec3& x) {
    const double r2 = x.squaredNorm();
    const double r = std::sqrt(r2);
    return (1.0 - 3.0 * x[2] * x[2] / r2) / (4.0 * kPi * r2 * r);
}

/// Mutual mobility of two sphere-surface force distributions with radii a, b:
/// [Phi + (a^2 + b^2)/6 Delta Phi](x). Exact for non-overlapping spheres.
inline Mat3 sphere_pair_tensor(const Vec3& x, double a, double b) {
    return oseen(x) + ((a * a + b * b) / 6.0) * oseen_laplacian(x);
}

} // namespace hsettle
