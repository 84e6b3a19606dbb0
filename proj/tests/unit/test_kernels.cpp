#include <gtest/gtest.h>

#include <random>

#include "hsettle/core/generators.hpp"
#include "hsettle/kernels/fields.hpp"
#include "oracles.hpp"

using namespace hsettle;

namespace {

const AxisBox kBox{{Interval{-0.3, 0.4}, Interval{-0.2, 0.6}, Interval{-0.5, 0.1}}};

} // namespace

TEST(Oseen, AxisValues) {
    EXPECT_NEAR((oseen(Vec3::UnitZ()) * Vec3::UnitZ())[2], 1.0 / (4.0 * kPi), 1e-16);
    EXPECT_NEAR((oseen(Vec3::UnitX()) * Vec3::UnitZ())[2], 1.0 / (8.0 * kPi), 1e-16);
    EXPECT_NEAR(1.0 / (4.0 * kPi), 0.0795775, 1e-7);
}

TEST(Oseen, HomogeneitySymmetryParity) {
    const Vec3 x(0.3, -0.4, 1.2);
    EXPECT_LT((oseen(2.0 * x) - oseen(x) / 2.0).norm(), 1e-16);
    EXPECT_LT((oseen(x) - oseen(x).transpose()).norm(), 1e-17);
    EXPECT_EQ(oseen(x), oseen(-x));
    EXPECT_THROW(oseen(Vec3::Zero()), SingularEvaluation);
}

TEST(Oseen, LaplacianMatchesFiniteDifferences) {
    const Vec3 x(0.7, -0.2, 0.5);
    const double e = 1e-3;
    Mat3 lap = Mat3::Zero();
    for (int k = 0; k < 3; ++k) {
        Vec3 d = Vec3::Zero();
        d[k] = e;
        lap += (oseen(x + d) - 2.0 * oseen(x) + oseen(x - d)) / (e * e);
    }
    EXPECT_LT((lap - oseen_laplacian(x)).norm(), 1e-5);
    EXPECT_NEAR(oseen33(x), oseen(x)(2, 2), 1e-16);
    EXPECT_NEAR(oseen_laplacian33(x), oseen_laplacian(x)(2, 2), 1e-15);
}

TEST(BoxPotentials, UnitCubeConstants) {
    const AxisBox unit{{Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}};
    EXPECT_NEAR(box_potentials(Vec3::Zero(), unit).newton, 1.5 * std::log(2.0 + std::sqrt(3.0)) - kPi / 4.0, 1e-14);
    const auto c = box_potentials(Vec3(0.5, 0.5, 0.5), unit);
    EXPECT_NEAR(c.newton, 2.380077363979553, 1e-13);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(c.hess_n(k, k), -4.0 * kPi / 3.0, 1e-13);
}

TEST(BoxPotentials, MatchGaussOracle) {
    for (const Vec3& x : {Vec3(1.3, 0.7, -0.9), Vec3(0.45, 0.1, -0.2), Vec3(0.4, 0.9, 0.5), Vec3(0.05, 0.1, -0.2)}) {
        const auto p = box_potentials(x, kBox);
        const double n = oracle::pyramid_gauss([&](const Vec3& y) { return 1.0 / (y - x).norm(); }, kBox, x, 24, 4);
        EXPECT_NEAR(p.newton, n, 1e-10 * std::abs(n));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                const double w = oracle::pyramid_gauss(
                    [&](const Vec3& y) {
                        const Vec3 u = y - x;
                        const double r = u.norm();
                        return (i == j ? 1.0 : 0.0) / r - u[i] * u[j] / (r * r * r);
                    },
                    kBox, x, 24, 4);
                EXPECT_NEAR(p.hess_w(i, j), w, 1e-9) << i << j;
            }
        }
    }
}

TEST(BoxPotentials, NewtonHessianMatchesFiniteDifferences) {
    for (const Vec3& x : {Vec3(1.3, 0.7, -0.9), Vec3(0.05, 0.1, -0.2), Vec3(0.5, 0.2, 0.3)}) {
        const double e = 1e-4;
        const auto p = box_potentials(x, kBox);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                Vec3 di = Vec3::Zero(), dj = Vec3::Zero();
                di[i] = e;
                dj[j] = e;
                const double fd = (box_potentials(x + di + dj, kBox).newton - box_potentials(x + di - dj, kBox).newton -
                                   box_potentials(x - di + dj, kBox).newton + box_potentials(x - di - dj, kBox).newton) /
                                  (4.0 * e * e);
                EXPECT_NEAR(p.hess_n(i, j), fd, 2e-5) << i << j;
            }
        }
        // trace is -4 pi inside, 0 outside
        const double tr = p.hess_n.trace();
        EXPECT_NEAR(tr, kBox.contains(x) ? -4.0 * kPi : 0.0, 1e-12);
    }
}

TEST(SphereField, InteriorDragValue) {
    SphereField s{Vec3(0.1, 0.2, 0.3), 0.1, Vec3::UnitZ()};
    const Vec3 u = sphere_field(s.center, s);
    EXPECT_NEAR(u[2], 1.0 / (6.0 * kPi * 0.1), 1e-15);
    EXPECT_NEAR(u[2], 0.530516, 1e-6);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Vec3 d(U(rng), U(rng), U(rng));
        if (d.norm() > 1.0) d /= 1.0001 * d.norm();
        const Vec3 v = sphere_field(s.center + 0.1 * d, s);
        EXPECT_LE((v - u).norm(), 1e-12 * u.norm());
    }
}

TEST(SphereField, FarFieldIsStokeslet) {
    SphereField s{Vec3::Zero(), 0.01, Vec3(0.2, -0.3, 1.0)};
    const Vec3 x = 100.0 * 0.01 * Vec3(0.6, 0.0, 0.8);
    const Vec3 st = oseen(x) * s.force;
    EXPECT_LE((sphere_field(x, s) - st).norm(), 1e-4 * st.norm());
}

TEST(SphereField, SurfaceQuadratureOracle) {
    SphereField s{Vec3(0.2, 0.1, -0.3), 0.05, Vec3(0.3, 0.4, 1.0)};
    auto avg = [&](const Vec3& x, const SphereRule& rule) {
        return sphere_average([&](const Vec3& y) -> Vec3 { return oseen(x - y) * s.force; }, s.center, s.radius, rule);
    };
    // 26-point rule: degree 7, accurate to 1e-8 once |x - c| >= 10 R
    for (const Vec3& d : {Vec3(0.5, 0.0, 0.0), Vec3(0.3, 0.3, 0.3), Vec3(-0.1, 0.4, 0.8)}) {
        const Vec3 x = s.center + d;
        const Vec3 u = sphere_field(x, s);
        EXPECT_LE((u - avg(x, lebedev26())).norm(), 1e-8 * u.norm());
    }
    // near the surface a higher-order product rule serves as the oracle
    const SphereRule fine = product_sphere_rule(64);
    for (double f : {1.2, 1.5, 3.0}) {
        const Vec3 x = s.center + f * s.radius * Vec3(0.48, 0.6, 0.64);
        const Vec3 u = sphere_field(x, s);
        EXPECT_LE((u - avg(x, fine)).norm(), 1e-8 * u.norm()) << f;
    }
}

TEST(SphereField, DivergenceFree) {
    SphereField s{Vec3::Zero(), 0.1, Vec3(0.0, 0.5, 1.0)};
    const double e = 1e-5;
    for (const Vec3& x : {Vec3(0.2, 0.1, 0.05), Vec3(-0.3, 0.2, 0.4), Vec3(0.0, 0.0, 0.12)}) {
        double div = 0.0;
        for (int k = 0; k < 3; ++k) {
            Vec3 d = Vec3::Zero();
            d[k] = e;
            div += (sphere_field(x + d, s)[k] - sphere_field(x - d, s)[k]) / (2.0 * e);
        }
        EXPECT_LT(std::abs(div), 1e-6 * sphere_field(x, s).norm() / x.norm());
    }
}

TEST(CubeField, CenterOfUnitCube) {
    CubeField q{Cube{Vec3::Zero(), 0.5}, Vec3::UnitZ()};
    const Vec3 u = cube_field(Vec3::Zero(), q);
    EXPECT_NEAR(u[2], 0.1263, 5e-5);
    EXPECT_NEAR(u[2], 2.380077363979553 / (6.0 * kPi), 1e-14);
    EXPECT_NEAR(u[0], 0.0, 1e-15);
    EXPECT_NEAR(u[1], 0.0, 1e-15);
    // independent quadrature with the singularity at a corner of each piece
    const double oracle =
        oracle::pyramid_gauss([](const Vec3& y) { return oseen33(-y); }, q.cube.box(), Vec3::Zero(), 24, 2);
    EXPECT_NEAR(u[2], oracle, 1e-12);
}

TEST(CubeField, AdaptiveOracleAgreement) {
    CubeField q{Cube{Vec3(0.1, -0.2, 0.3), 0.25}, Vec3(0.2, 0.1, 1.0)};
    for (const Vec3& x : {Vec3(0.12, -0.1, 0.2), Vec3(0.5, -0.2, 0.3), Vec3(1.1, 0.4, -0.3)}) {
        const Vec3 u = cube_field(x, q);
        for (int k = 0; k < 3; ++k) {
            const double ref = oracle::pyramid_gauss([&](const Vec3& y) { return (oseen(x - y) * q.force)[k]; }, q.cube.box(), x,
                                           24, 3) /
                               q.cube.volume();
            EXPECT_NEAR(u[k], ref, 1e-9 * u.norm());
        }
    }
}

TEST(CubeField, BranchesAgree) {
    // the three evaluation strategies overlap smoothly
    CubeField closed{Cube{Vec3::Zero(), 0.1}, Vec3(0.3, -0.2, 1.0), 8, 1e9, 1e9};
    CubeField gauss{Cube{Vec3::Zero(), 0.1}, Vec3(0.3, -0.2, 1.0), 8, 0.0, 1e9};
    for (double d : {0.5, 1.0, 2.0}) {
        const Vec3 x = d * Vec3(0.36, 0.48, 0.8);
        EXPECT_LE((cube_field(x, closed) - cube_field(x, gauss)).norm(), 1e-12 * cube_field(x, gauss).norm());
        EXPECT_LE((cube_tensor_laplacian(x, closed) - cube_tensor_laplacian(x, gauss)).norm(),
                  1e-10 * cube_tensor_laplacian(x, gauss).norm());
    }
}

TEST(CubeField, FarFieldStokesletAndRate) {
    const double h = 0.05;
    CubeField q{Cube{Vec3(0.2, 0.2, 0.2), h}, Vec3::UnitZ()};
    const Vec3 dir = Vec3(1.0, 2.0, 2.0) / 3.0;
    {
        const Vec3 x = q.cube.center + (50.0 * h + h) * dir;
        const Vec3 st = oseen(x - q.cube.center) * q.force;
        EXPECT_LE((cube_field(x, q) - st).norm(), 1e-3 * st.norm());
    }
    std::vector<double> lx, ly;
    for (double f = 10.0; f <= 1000.0; f *= std::sqrt(10.0)) {
        const Vec3 x = q.cube.center + f * h * dir;
        const Vec3 st = oseen(x - q.cube.center) * q.force;
        lx.push_back(std::log(f));
        ly.push_back(std::log((cube_field(x, q) - st).norm() / st.norm()));
    }
    const double n = lx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    EXPECT_NEAR(slope, -2.0, 0.1);
}

TEST(CubeField, ReflectionSymmetry) {
    CubeField q{Cube{Vec3(0.3, 0.1, -0.2), 0.2}, Vec3::UnitZ()};
    for (const Vec3& z : {Vec3(0.05, 0.1, 0.02), Vec3(0.4, -0.3, 0.2), Vec3(2.0, 1.0, -3.0)}) {
        EXPECT_NEAR(cube_field(q.cube.center + z, q)[2], cube_field(q.cube.center - z, q)[2], 1e-13);
    }
}

TEST(CubeField, SphereAverageMeanValue) {
    CubeField q{Cube{Vec3(0.0, 0.0, 0.0), 0.25}, Vec3(0.1, 0.2, 1.0)};
    const SphereRule rule = product_sphere_rule(24);
    for (auto [c, R] : {std::pair{Vec3(0.02, -0.03, 0.01), 0.1}, std::pair{Vec3(0.6, 0.3, -0.2), 0.1},
                        std::pair{Vec3(0.0, 0.0, 0.0), 0.2}}) {
        const Vec3 exact = cube_field_sphere_average(c, R, q);
        const Vec3 quad = sphere_average([&](const Vec3& y) -> Vec3 { return cube_field(y, q); }, c, R, rule);
        EXPECT_LE((exact - quad).norm(), 1e-11 * exact.norm());
    }
    EXPECT_THROW(cube_field_sphere_average(Vec3(0.2, 0.0, 0.0), 0.1, q), GeometryError);
}

TEST(ElementaryField, DiagonalStructureAndDecay) {
    auto c = generate_cubic_lattice(4, 0.1, Domain::unit_cube());
    const std::size_t i = 21;
    const KernelField U = elementary_field(i, c);
    const double R = c.radius();
    const double amp = 1.0 / c.scale();
    // <delta_i^R, U_i . e3> = N^{-1/3}(V_r^St ... ) with V^St = 1/(6 pi R) for unit force
    const SphereRule rule = product_sphere_rule(24);
    const double surf = sphere_average([&](const Vec3& y) { return U(y)[2]; }, c.centers[i], R, rule);
    const double cube_part = cube_field_sphere_average(c.centers[i], R, U.cube())[2];
    EXPECT_NEAR(surf, amp / (6.0 * kPi * R) - cube_part, 1e-9 * std::abs(surf));
    // |U_i(x)| <= C N^{-1/3}/|x - X_i| beyond one cube diameter
    std::mt19937_64 rng(9);
    std::normal_distribution<double> G;
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        Vec3 d(G(rng), G(rng), G(rng));
        d.normalize();
        const double dist = 2.0 * c.cubes[i].side() * std::exp(3.0 * std::uniform_real_distribution<double>(0, 1)(rng));
        const Vec3 x = c.centers[i] + dist * d;
        worst = std::max(worst, U(x).norm() * dist / amp);
    }
    EXPECT_LT(worst, 1.0);
    // divergence-free at exterior points
    const double e = 1e-5;
    for (int t = 0; t < 100; ++t) {
        Vec3 d(G(rng), G(rng), G(rng));
        const Vec3 x = c.centers[i] + 0.2 * d;
        if ((x - c.centers[i]).norm() < 1.2 * R) continue;
        if (c.cubes[i].distance(x) < 1e-3) continue;
        double div = 0.0;
        for (int k = 0; k < 3; ++k) {
            Vec3 s = Vec3::Zero();
            s[k] = e;
            div += (U(x + s)[k] - U(x - s)[k]) / (2.0 * e);
        }
        EXPECT_LT(std::abs(div), 1e-6);
    }
}

TEST(ElementaryField, RejectsBallOutsideCube) {
    auto c = generate_cubic_lattice(2, 0.05, Domain::unit_cube());
    c.cubes[0].half_width = 0.5 * c.radius();
    EXPECT_THROW(elementary_field(0, c), GeometryError);
}
