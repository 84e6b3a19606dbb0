#pragma once

#include <cmath>

#include "hsettle/core/configuration.hpp"
#include "hsettle/kernels/box_potentials.hpp"
#include "hsettle/kernels/oseen.hpp"
#include "hsettle/kernels/quadrature.hpp"

namespace hsettle {

/// Velocity of a force F spread uniformly over a sphere surface.
struct SphereField {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    Vec3 force = Vec3::UnitZ();
};

/// Velocity of a force F spread uniformly over a cube. Near the cube the
/// closed-form potentials are used, at intermediate range a tensor Gauss rule,
/// and beyond `multipole_factor` half-widths the second-moment expansion.
struct CubeField {
    Cube cube;
    Vec3 force = Vec3::UnitZ();
    int order = 8;
    double closed_factor = 8.0;
    double multipole_factor = 200.0;
};

/// Interior: F/(6 pi R). Exterior: [Phi + R^2/6 Delta Phi](x - c) F, which is
/// the exact surface average because Phi is biharmonic.
inline Vec3 sphere_field(const Vec3& x, const SphereField& s) {
    if (!(s.radius > 0.0)) throw PreconditionError("sphere radius must be positive");
    const Vec3 d = x - s.center;
    const double R = s.radius;
    if (d.squaredNorm() <= R * R) return s.force / (6.0 * kPi * R);
    return (oseen(d) + (R * R / 6.0) * oseen_laplacian(d)) * s.force;
}

/// Cube-averaged Stokeslet tensor C(x) = |Q|^{-1} int_Q Phi(x - y) dy.
inline Mat3 cube_tensor(const Vec3& x, const CubeField& q) {
    const double h = q.cube.half_width;
    if (!(h > 0.0)) throw PreconditionError("degenerate cube");
    const double vol = q.cube.volume();
    const double dist = q.cube.distance(x);
    if (dist < q.closed_factor * h) {
        const BoxPotentials p = box_potentials(x, q.cube.box(), false);
        return (2.0 * p.newton * Mat3::Identity() - p.hess_w) / (8.0 * kPi * vol);
    }
    const Vec3 d = x - q.cube.center;
    if (dist >= q.multipole_factor * h) return oseen(d) + (h * h / 6.0) * oseen_laplacian(d);
    Mat3 acc = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const double v = integrate_box_gauss(
                [&](const Vec3& y) {
                    const Vec3 z = x - y;
                    const double r2 = z.squaredNorm();
                    return ((a == b ? 1.0 : 0.0) + z[a] * z[b] / r2) / std::sqrt(r2);
                },
                q.cube.box(), q.order);
            acc(a, b) = acc(b, a) = v / (8.0 * kPi * vol);
        }
    }
    return acc;
}

inline Vec3 cube_field(const Vec3& x, const CubeField& q) { return cube_tensor(x, q) * q.force; }

/// Laplacian of the cube-averaged tensor; inside Q it carries the -I/|Q| jump term.
inline Mat3 cube_tensor_laplacian(const Vec3& x, const CubeField& q) {
    const double h = q.cube.half_width;
    const double vol = q.cube.volume();
    const double dist = q.cube.distance(x);
    if (dist < q.closed_factor * h) {
        const BoxPotentials p = box_potentials(x, q.cube.box(), true);
        Mat3 m = -p.hess_n / (4.0 * kPi * vol);
        if (q.cube.box().contains(x)) m -= Mat3::Identity() / vol;
        return m;
    }
    const Vec3 d = x - q.cube.center;
    if (dist >= q.multipole_factor * h) return oseen_laplacian(d);
    Mat3 acc = Mat3::Zero();
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            const double v = integrate_box_gauss(
                [&](const Vec3& y) {
                    const Vec3 z = x - y;
                    const double r2 = z.squaredNorm();
                    return ((a == b ? 1.0 : 0.0) - 3.0 * z[a] * z[b] / r2) / (r2 * std::sqrt(r2));
                },
                q.cube.box(), q.order);
            acc(a, b) = acc(b, a) = v / (4.0 * kPi * vol);
        }
    }
    return acc;
}

/// Average of the cube field over the sphere |y - c| = R. Exact by the
/// biharmonic mean-value identity provided the sphere does not cross dQ.
inline Vec3 cube_field_sphere_average(const Vec3& c, double R, const CubeField& q) {
    const bool inside = q.cube.contains_ball(c, R, 0.0);
    if (!inside && q.cube.distance(c) <= R) throw GeometryError("sphere crosses the cube boundary");
    return (cube_tensor(c, q) + (R * R / 6.0) * cube_tensor_laplacian(c, q)) * q.force;
}

/// U_i = N^{-1/3}[sphere field of (X_i, R) - cube field of Q_i], force e3.
class KernelField {
public:
    KernelField(std::size_t i, const ParticleConfiguration& c) {
        if (i >= c.N()) throw PreconditionError("particle index out of range");
        if (!c.has_cubes()) throw PreconditionError("elementary field needs cubes");
        const double amp = 1.0 / c.scale();
        sphere_ = SphereField{c.centers[i], c.radius(), amp * Vec3::UnitZ()};
        cube_ = CubeField{c.cubes[i], amp * Vec3::UnitZ()};
        if (!cube_.cube.contains_ball(sphere_.center, sphere_.radius)) throw GeometryError("ball B_i not inside Q_i");
    }

    Vec3 operator()(const Vec3& x) const { return sphere_field(x, sphere_) - cube_field(x, cube_); }

    const SphereField& sphere() const { return sphere_; }
    const CubeField& cube() const { return cube_; }

private:
    SphereField sphere_;
    CubeField cube_;
};

inline KernelField elementary_field(std::size_t i, const ParticleConfiguration& c) { return KernelField(i, c); }

} // namespace hsettle
