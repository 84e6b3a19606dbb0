#include <gtest/gtest.h>

#include <chrono>

#include "hsettle/core/generators.hpp"
#include "hsettle/freespace/energy.hpp"
#include "oracles.hpp"

using namespace hsettle;

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += std::log(x[i]);
        sy += std::log(y[i]);
        sxx += std::log(x[i]) * std::log(x[i]);
        sxy += std::log(x[i]) * std::log(y[i]);
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST(Diagonal, LeadingTermAndCorrectionSign) {
    auto c = generate_cubic_lattice(10, 0.05, Domain::unit_cube());
    const double lead = 0.1 / (6.0 * kPi * 0.05);
    EXPECT_NEAR(lead, 0.106103, 1e-6);
    const double d = diagonal_energy(0, c);
    EXPECT_LT(d, lead);
    EXPECT_GT(d, 0.0);
    EXPECT_GT(diagonal_correction_constant(0, c), 0.0);
}

TEST(Diagonal, ClosedFormMatchesQuadrature) {
    const double h = 0.3, R = 0.12;
    const CubeField q{Cube{Vec3::Zero(), h}, Vec3::UnitZ()};
    // B_ii by the mean-value identity on the closed-form field, D_ii by adaptive cube averaging
    const double b = cube_field_sphere_average(Vec3::Zero(), R, q)[2];
    const double d = unit::cube_cube_near(Vec3::Zero(), h, h);
    EXPECT_NEAR(d, unit::cube_cube_adaptive(Vec3::Zero(), h, h, 1e-9), 1e-8 * d);
    const double expect = 1.0 / (6.0 * kPi * R) - 2.0 * b + d;
    EXPECT_NEAR(unit::diagonal(h, R), expect, 1e-11 * expect);
    // B_ii through an explicit sphere rule
    const double bq = sphere_average([&](const Vec3& y) { return cube_field(y, q)[2]; }, Vec3::Zero(), R,
                                     product_sphere_rule(24));
    EXPECT_NEAR(b, bq, 1e-12);
}

TEST(Diagonal, ScaleInvariance) {
    auto a = generate_cubic_lattice(4, 0.05, Domain::unit_cube());
    auto b = generate_cubic_lattice(8, 0.05, Domain::unit_cube());
    EXPECT_NEAR(diagonal_energy(0, a) / diagonal_energy(0, b), 2.0, 1e-6);
}

TEST(Pair, Symmetry) {
    auto [c, n] = generate_shifted_example(3, 0.15, 0.05);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 30}, {5, 44}, {9, 27}, {2, 53}}) {
        const double a = pair_interaction(i, j, c), b = pair_interaction(j, i, c);
        EXPECT_EQ(a, b);
        EXPECT_TRUE(std::isfinite(a));
    }
}

TEST(Pair, NearTermsAgreeWithIndependentQuadrature) {
    // unit-force pair for adjacent unequal cubes vs. sphere-rule + pyramid-rule oracle
    const double hi = 0.1, hj = 0.07, R = 0.03;
    const Vec3 c(0.17, 0.02, -0.01);
    const CubeField qj{Cube{Vec3::Zero(), hj}, Vec3::UnitZ()};
    const SphereRule rule = product_sphere_rule(20);
    const double bij = sphere_average([&](const Vec3& y) { return cube_field(y, qj)[2]; }, c, R, rule);
    EXPECT_NEAR(unit::sphere_cube(c, hj, R), bij, 1e-13);
    // D against octree quadrature of the closed-form cube field over Q_i
    const double d = unit::cube_cube(c, hi, hj);
    EXPECT_NEAR(d, unit::cube_cube_adaptive(c, hi, hj, 1e-10), 1e-8 * d);
    // touching and overlapping-shadow placements
    for (const Vec3& o : {Vec3(0.17, 0.0, 0.0), Vec3(0.17, 0.17, 0.0), Vec3(0.2, 0.05, 0.03)}) {
        const double v = unit::cube_cube(o, hi, hj);
        EXPECT_NEAR(v, unit::cube_cube_adaptive(o, hi, hj, 1e-10), 1e-8 * v);
    }
}

TEST(Pair, TrapezoidAndNearRangesAgree) {
    for (double d : {0.25, 0.35, 0.5}) {
        const Vec3 c = d * Vec3(0.8, 0.6, 0.0) + Vec3(0, 0, 0.05);
        EXPECT_NEAR(unit::cube_cube_trapezoid(c, 0.05, 0.04), unit::cube_cube_near(c, 0.05, 0.04),
                    1e-10 * unit::cube_cube_near(c, 0.05, 0.04));
    }
}

TEST(Pair, FarDecayBoundAndRate) {
    // two lattice cells (h = 1/16) and spheres with R = 0.05 N^{-1/3}
    const double h = 1.0 / 16.0, R = 0.05 / 8.0;
    const Vec3 dir = Vec3(1.0, 2.0, 2.0) / 3.0;
    std::vector<double> ds, vs;
    for (double f : {6.0, 8.0, 11.0, 16.0, 22.0}) {
        const double d = f * 2.0 * h;
        const double v = std::abs(unit::pair(d * dir, h, h, R));
        const double gap = unit::box_gap(d * dir, h, h);
        // truncation-bound form C (R^2 + h^2)^2 / dist^5
        EXPECT_LE(v, kTruncationConstant * (R * R + h * h) * (R * R + h * h) / std::pow(gap, 5));
        ds.push_back(d);
        vs.push_back(v);
    }
    // both second moments are isotropic and Phi is biharmonic, so the decay is d^-7
    EXPECT_NEAR(fit_slope(ds, vs), -7.0, 0.3);
}

TEST(Pair, IsolatedSpheresOnAxis) {
    const double R = 0.01, h = 20.0 * R;
    const double v = sphere_pair_interaction(Vec3(0, 0, h), Vec3::Zero(), R);
    EXPECT_NEAR(v, 1.0 / (4.0 * kPi * h), (R / h) * (R / h) / (4.0 * kPi * h));
    // double surface average of the Stokeslet
    const SphereRule rule = product_sphere_rule(16);
    const double quad = sphere_average(
        [&](const Vec3& x) {
            return sphere_average([&](const Vec3& y) { return oseen33(x - y); }, Vec3::Zero(), R, rule);
        },
        Vec3(0, 0, h), R, rule);
    EXPECT_NEAR(v, quad, 1e-12 * v);
}

TEST(Assembly, SingleParticle) {
    auto c = generate_cubic_lattice(1, 0.1, Domain::unit_cube());
    const auto e = assemble_energy(c);
    EXPECT_EQ(e.total, diagonal_energy(0, c));
    EXPECT_EQ(e.offdiagonal_sum, 0.0);
}

TEST(Assembly, TwoParticlesIdentity) {
    ParticleConfiguration c;
    c.r = 0.05;
    c.domain = Domain::box({0, 4}, {0, 1}, {0, 1});
    c.centers = {Vec3(0.5, 0.5, 0.5), Vec3(3.5, 0.5, 0.5)};
    c.cubes = {Cube{c.centers[0], 0.5}, Cube{c.centers[1], 0.5}};
    const auto e = assemble_energy(c);
    const double expect = 2.0 * diagonal_energy(0, c) + 2.0 * pair_interaction(0, 1, c);
    EXPECT_NEAR(e.total, expect, 1e-12 * e.total);
    EXPECT_NEAR(e.total, e.diagonal_sum + e.offdiagonal_sum, 1e-12 * e.total);
}

TEST(Assembly, LatticeBelowStokesAndBookkeeping) {
    auto c = generate_cubic_lattice(4, 0.05, Domain::unit_cube());
    const auto e = assemble_energy(c);
    const double n23 = 1.0 / 16.0;
    const double v = n23 * e.total;
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0 / (6.0 * kPi * 0.05));
    // brute bookkeeping over all ordered pairs
    CompensatedSum s;
    for (std::size_t i = 0; i < c.N(); ++i) {
        s.add(diagonal_energy(i, c));
        for (std::size_t j = 0; j < c.N(); ++j) {
            if (i != j) s.add(pair_interaction(i, j, c));
        }
    }
    EXPECT_NEAR(e.total, s.value(), 1e-12 * e.total);
}

TEST(Assembly, ThreadCountDoesNotChangeBits) {
    auto [c, n] = generate_shifted_example(3, 0.2, 0.04);
    EnergyOptions one, three;
    three.threads = 3;
    three.block_rows = 5;
    one.block_rows = 5;
    const auto a = assemble_energy(c, one), b = assemble_energy(c, three);
    EXPECT_EQ(a.total, b.total);
    EXPECT_EQ(a.offdiagonal_sum, b.offdiagonal_sum);
    const auto again = assemble_energy(c, one);
    EXPECT_EQ(a.total, again.total);
}

TEST(Assembly, CutoffSoundness) {
    auto c = generate_cubic_lattice(6, 0.05, Domain::unit_cube());
    const auto exact = assemble_energy(c);
    for (double rc : {0.4, 0.6}) {
        EnergyOptions o;
        o.policy = EnergyPolicy::cutoff;
        o.cutoff_radius = rc;
        const auto cut = assemble_energy(c, o);
        EXPECT_GT(cut.trunc_bound, 0.0);
        EXPECT_LE(std::abs(exact.total - cut.total), cut.trunc_bound);
    }
    EnergyOptions bad;
    bad.policy = EnergyPolicy::cutoff;
    bad.cutoff_radius = 0.1;
    EXPECT_THROW(assemble_energy(c, bad), Error);
}

TEST(FieldEvaluation, FarDecayCubic) {
    auto c = generate_cubic_lattice(3, 0.1, Domain::unit_cube());
    const Vec3 mid(0.5, 0.5, 0.5), dir = Vec3(0.3, 0.5, 0.812404).normalized();
    std::vector<double> ds, vs;
    for (double d : {4.0, 8.0, 16.0, 32.0}) {
        const Vec3 x = mid + d * dir;
        const Vec3 v = evaluate_vN1(x, c);
        // isotropic second-moment mismatch (R^2 - h^2)/6 of each sphere/cube pair
        Vec3 m = Vec3::Zero();
        const double R = c.radius(), h = c.cubes[0].half_width;
        for (const Vec3& X : c.centers) m += (R * R - h * h) / 6.0 * oseen_laplacian(x - X) * Vec3::UnitZ();
        m /= c.scale();
        EXPECT_NEAR(v.norm(), m.norm(), 0.05 / (d * d) * m.norm());
        ds.push_back(d);
        vs.push_back(v.norm());
    }
    EXPECT_NEAR(fit_slope(ds, vs), -3.0, 0.1);
}

TEST(FieldEvaluation, GradientBoundNearCloud) {
    auto c = generate_cubic_lattice(3, 0.1, Domain::unit_cube());
    const double e = 1e-5;
    double worst = 0.0;
    for (const Vec3& x : {Vec3(0.2, 0.3, 0.41), Vec3(0.5, 0.5, 0.62), Vec3(1.3, 0.5, 0.5), Vec3(0.5, -0.4, 0.2)}) {
        Mat3 g;
        for (int k = 0; k < 3; ++k) {
            Vec3 d = Vec3::Zero();
            d[k] = e;
            g.col(k) = (evaluate_vN1(x + d, c) - evaluate_vN1(x - d, c)) / (2.0 * e);
        }
        const Cube hull{Vec3(0.5, 0.5, 0.5), 0.5};
        const double dist = hull.distance(x);
        const double bound = std::min(c.scale(), dist > 0 ? 1.0 / dist : 1e300);
        worst = std::max(worst, g.norm() / bound);
    }
    EXPECT_LT(worst, 1.0);
}

TEST(FieldEvaluation, MirrorSymmetryOfShiftedExample) {
    auto [c, n] = generate_shifted_example(2, 0.2, 0.05);
    for (const Vec3& x : {Vec3(0.3, 0.2, 0.7), Vec3(0.05, 0.6, 0.3), Vec3(1.5, 0.4, -0.2)}) {
        const Vec3 xm(-x[0], x[1], x[2]);
        EXPECT_NEAR(evaluate_vN1(x, c)[2], evaluate_vN1(xm, c)[2], 1e-13);
    }
}

TEST(QuadraticForm, IndependentQuadratureMatchesTotal) {
    // <(rho_bar - sigma) e3, v_{N,1}> = N^{-2/3} E by the weak form
    auto c = generate_cubic_lattice(2, 0.1, Domain::unit_cube());
    const double R = c.radius();
    const auto e = assemble_energy(c);
    const SphereRule rule = product_sphere_rule(24);
    CompensatedSum s;
    const double w = 1.0 / c.N();
    for (std::size_t i = 0; i < c.N(); ++i) {
        s.add(w * sphere_average([&](const Vec3& y) { return evaluate_vN1(y, c)[2]; }, c.centers[i], R, rule));
        const double cube_int = oracle::pyramid_gauss([&](const Vec3& y) { return evaluate_vN1(y, c)[2]; },
                                                      c.cubes[i].box(), c.centers[i], 10, 1, R);
        s.add(-w * cube_int / c.cubes[i].volume());
    }
    const double n23 = 1.0 / (c.scale() * c.scale());
    EXPECT_NEAR(s.value(), n23 * e.total, 1e-6 * n23 * e.total);
}

TEST(SedEstimate, Bookkeeping) {
    auto c = generate_cubic_lattice(3, 0.05, Domain::unit_cube());
    const auto e = assemble_energy(c);
    EXPECT_NEAR(sed_velocity_estimate(e, 0.0), e.total / 9.0, 1e-15);
    EXPECT_NEAR(sed_velocity_estimate(e, 0.25) - 0.25, e.total / 9.0, 1e-14);
}
