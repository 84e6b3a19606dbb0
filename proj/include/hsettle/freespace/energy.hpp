#pragma once

// Energy ||grad v_{N,1}||^2 of the whole-space field driven by
// N^{-1/3} sum_i (delta_i^R - 1_{Q_i}/|Q_i|) e3, assembled from
//   diag_i = N^{-2/3} <mu_i, G_i>,  pair_ij = N^{-2/3} <mu_i, G_j>,
// with mu_i = delta_i^R - 1_{Q_i}/|Q_i| and G_j the unit-force elementary
// field. Each pair splits into sphere/sphere, sphere/cube and cube/cube terms
//   A - B_ij - B_ji + D_ij.

#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "hsettle/core/configuration.hpp"
#include "hsettle/kernels/fields.hpp"

namespace hsettle {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = s_ + x;
        if (std::abs(s_) >= std::abs(x)) {
            c_ += (s_ - t) + x;
        } else {
            c_ += (x - t) + s_;
        }
        s_ = t;
    }
    void add(const CompensatedSum& o) {
        add(o.s_);
        add(o.c_);
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

// int over [-1/2,1/2]^3 of 1/|y|, and int int over two unit cubes of 1/|x - y|
inline constexpr double kCubeNewtonCenter = 2.380077363979553;
inline constexpr double kCubeSelfNewton = 1.8823126443896705;
// upper bound for sup_{|z|=1} |grad^4 Phi_33(z)|_F / 4 (numerical sup 7.7284 / 4)
inline constexpr double kTruncationConstant = 2.0;

namespace unit {

/// <delta^R_a, Phi_33 * delta^R_b> for centers at offset c.
inline double sphere_sphere(const Vec3& c, double R) { return oseen33(c) + (R * R / 3.0) * oseen_laplacian33(c); }

/// Sphere average (center x, radius R) of the e3.e3 cube field of the cube of
/// half-width h centered at the origin; the sphere must lie outside the cube.
inline double sphere_cube(const Vec3& x, double h, double R) {
    const Cube q{Vec3::Zero(), h};
    const double vol = q.volume();
    if (q.distance(x) < 8.0 * h) {
        const BoxPotentials p = box_potentials(x, q.box(), true);
        const double c33 = (2.0 * p.newton - p.hess_w(2, 2)) / (8.0 * kPi * vol);
        const double l33 = -p.hess_n(2, 2) / (4.0 * kPi * vol);
        return c33 + (R * R / 6.0) * l33;
    }
    const double k = R * R / 6.0;
    return integrate_box_gauss([&](const Vec3& y) {
               const Vec3 z = x - y;
               return oseen33(z) + k * oseen_laplacian33(z);
           },
                               q.box(), 8) /
           vol;
}

/// Far-range cube/cube term: Phi_33 against the product of the 1-D
/// trapezoids (uniform[-a,a] * uniform[-b,b]), Gauss on each linear piece.
inline double cube_cube_trapezoid(const Vec3& c, double a, double b, int order = 8) {
    const GaussRule& g = gauss_rule(order);
    const double lo = std::abs(a - b), hi = a + b, top = 1.0 / (2.0 * std::max(a, b));
    std::array<std::vector<double>, 3> nodes, weights;
    for (int k = 0; k < 3; ++k) {
        const double br[4] = {-hi, -lo, lo, hi};
        for (int p = 0; p < 3; ++p) {
            const double t0 = br[p], t1 = br[p + 1];
            if (t1 <= t0) continue;
            for (int i = 0; i < order; ++i) {
                const double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * g.x[i];
                const double shape = (std::abs(t) <= lo) ? top : top * (hi - std::abs(t)) / (hi - lo);
                nodes[k].push_back(c[k] + t);
                weights[k].push_back(0.5 * (t1 - t0) * g.w[i] * shape);
            }
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < nodes[0].size(); ++i) {
        double s1 = 0.0;
        for (std::size_t j = 0; j < nodes[1].size(); ++j) {
            double s2 = 0.0;
            for (std::size_t k = 0; k < nodes[2].size(); ++k) {
                s2 += weights[2][k] * oseen33(Vec3(nodes[0][i], nodes[1][j], nodes[2][k]));
            }
            s1 += weights[1][j] * s2;
        }
        s += weights[0][i] * s1;
    }
    return s;
}

/// Quartic primitive with d_y^2 d_z^2 Q(x; y, z) = |(x, y, z)|.
inline double quartic_primitive(double x, double y, double z) {
    const double x2 = x * x, y2 = y * y, z2 = z * z;
    const double r = std::sqrt(x2 + y2 + z2);
    if (r == 0.0) return 0.0;
    double v = r * (x2 * x2 / 15.0 - (y2 * y2 + z2 * z2) / 60.0 - 0.075 * x2 * (y2 + z2) + y2 * z2 / 20.0);
    if (y != 0.0 && x2 + z2 > 0.0) v += y * std::asinh(y / std::sqrt(x2 + z2)) * (-x2 * x2 / 8.0 + z2 * z2 / 24.0 + x2 * z2 / 4.0);
    if (z != 0.0 && x2 + y2 > 0.0) v += z * std::asinh(z / std::sqrt(x2 + y2)) * (-x2 * x2 / 8.0 + y2 * y2 / 24.0 + x2 * y2 / 4.0);
    if (x != 0.0) v -= x2 * x * y * z / 3.0 * std::atan(y * z / (x * r));
    return v;
}

/// Near-range cube/cube term in closed form. Phi_33 = (d_1^2 + d_2^2) r / (8 pi),
/// so the double cube average is a 64-corner second difference of Q.
inline double cube_cube_near(const Vec3& c, double a, double b) {
    std::array<std::array<double, 4>, 3> t{};
    for (int k = 0; k < 3; ++k) t[k] = {c[k] + a + b, c[k] - a - b, c[k] + a - b, c[k] - a + b};
    constexpr double sg[4] = {1.0, 1.0, -1.0, -1.0};
    CompensatedSum s;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) {
                const double w = sg[i] * sg[j] * sg[k];
                s.add(w * quartic_primitive(t[0][i], t[1][j], t[2][k]));
                s.add(w * quartic_primitive(t[1][j], t[0][i], t[2][k]));
            }
        }
    }
    const double va = 8.0 * a * a * a, vb = 8.0 * b * b * b;
    return s.value() / (8.0 * kPi * va * vb);
}

/// Average over Q_a = c + [-a,a]^3 of the closed-form e3.e3 field of
/// Q_b = [-b,b]^3 by octree Gauss quadrature. Slow; kept as a cross-check.
inline double cube_cube_adaptive(const Vec3& c, double a, double b, double abs_tol) {
    const Cube qb{Vec3::Zero(), b};
    const double vb = qb.volume();
    const Cube qa{c, a};
    auto f = [&](const Vec3& x) {
        const BoxPotentials p = box_potentials(x, qb.box(), false);
        return (2.0 * p.newton - p.hess_w(2, 2)) / (8.0 * kPi * vb);
    };
    const auto r = integrate_box_adaptive(f, qa.box(), 6, abs_tol * qa.volume(), 6);
    return r.value / qa.volume();
}

inline double box_gap(const Vec3& c, double a, double b) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double d = std::max(0.0, std::abs(c[k]) - a - b);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Cube/cube term <sigma_a, C_b> for cubes of half-widths a, b at offset c.
inline double cube_cube(const Vec3& c, double a, double b) {
    if (box_gap(c, a, b) >= 4.0 * std::max(a, b)) return cube_cube_trapezoid(c, a, b);
    return cube_cube_near(c, a, b);
}

/// <mu_i, G_j> for i != j: offset c = X_i - X_j, half-widths hi, hj.
inline double pair(const Vec3& c, double hi, double hj, double R) {
    return sphere_sphere(c, R) - sphere_cube(c, hj, R) - sphere_cube(-c, hi, R) + cube_cube(c, hi, hj);
}

/// <mu_i, G_i> for a sphere of radius R centered in a cube of half-width h.
inline double diagonal(double h, double R) {
    const double L = 2.0 * h;
    const double vst = 1.0 / (6.0 * kPi * R);
    const double b = kCubeNewtonCenter / (6.0 * kPi * L) - R * R / (9.0 * L * L * L);
    const double d = kCubeSelfNewton / (6.0 * kPi * L);
    return vst - 2.0 * b + d;
}

} // namespace unit

/// Pair-term cache keyed by quantized geometry. Values are computed from the
/// dequantized key, so a value never depends on which pair filled the entry.
class PairCache {
public:
    static constexpr double kQuantum = 0x1.0p-40;

    struct Key {
        std::int64_t ha, hb, c0, c1, c2;
        bool operator==(const Key&) const = default;
        bool operator<(const Key& o) const {
            return std::tie(ha, hb, c0, c1, c2) < std::tie(o.ha, o.hb, o.c0, o.c1, o.c2);
        }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = 1469598103934665603ULL;
            for (std::int64_t v : {k.ha, k.hb, k.c0, k.c1, k.c2}) {
                h ^= static_cast<std::uint64_t>(v);
                h *= 1099511628211ULL;
            }
            return static_cast<std::size_t>(h);
        }
    };

    explicit PairCache(double R) : R_(R) {}

    static std::int64_t q(double v) { return static_cast<std::int64_t>(std::llround(v / kQuantum)); }

    /// Canonical key: (i, j) and (j, i) map to the same entry.
    static Key key(const Vec3& c, double hi, double hj) {
        const Key k1{q(hi), q(hj), q(c[0]), q(c[1]), q(c[2])};
        const Key k2{k1.hb, k1.ha, -k1.c0, -k1.c1, -k1.c2};
        return k2 < k1 ? k2 : k1;
    }

    double value(const Key& k) {
        auto it = map_.find(k);
        if (it != map_.end()) return it->second;
        const Vec3 c(k.c0 * kQuantum, k.c1 * kQuantum, k.c2 * kQuantum);
        const double v = unit::pair(c, k.ha * kQuantum, k.hb * kQuantum, R_);
        map_.emplace(k, v);
        return v;
    }

    std::size_t size() const { return map_.size(); }

private:
    double R_;
    std::unordered_map<Key, double, KeyHash> map_;
};

namespace detail {

inline void require_energy_geometry(const ParticleConfiguration& c) {
    if (!c.has_cubes()) throw PreconditionError("energy assembly needs one cube per particle");
    const double R = c.radius();
    for (std::size_t i = 0; i < c.N(); ++i) {
        if (!c.cubes[i].contains_ball(c.centers[i], R)) throw GeometryError("ball B_i not inside Q_i");
    }
}

} // namespace detail

inline double diagonal_energy(std::size_t i, const ParticleConfiguration& c) {
    detail::require_energy_geometry(c);
    const double n23 = 1.0 / (c.scale() * c.scale());
    return n23 * unit::diagonal(c.cubes.at(i).half_width, c.radius());
}

/// |diag_i - N^{-1/3} V_r^St| N^{1/3}: the O(1) constant of the diagonal estimate.
inline double diagonal_correction_constant(std::size_t i, const ParticleConfiguration& c) {
    const double vst = 1.0 / (6.0 * kPi * c.r);
    return std::abs(diagonal_energy(i, c) - vst / c.scale()) * c.scale();
}

inline double pair_interaction(std::size_t i, std::size_t j, const ParticleConfiguration& c) {
    if (i == j) throw PreconditionError("pair_interaction needs i != j");
    detail::require_energy_geometry(c);
    const double n23 = 1.0 / (c.scale() * c.scale());
    PairCache cache(c.radius());
    const auto k = PairCache::key(c.centers[i] - c.centers[j], c.cubes[i].half_width, c.cubes[j].half_width);
    return n23 * cache.value(k);
}

/// Interaction of two bare sphere-surface forces (no cube subtraction), unit forces along e3.
inline double sphere_pair_interaction(const Vec3& a, const Vec3& b, double R) { return unit::sphere_sphere(a - b, R); }

enum class EnergyPolicy { exact_all_pairs, cutoff };

struct EnergyOptions {
    EnergyPolicy policy = EnergyPolicy::exact_all_pairs;
    double cutoff_radius = 0.0; // center distance beyond which pairs are bounded, not computed
    int threads = 1;
    std::size_t block_rows = 32;
    bool timing = false;
};

struct EnergyBreakdown {
    std::size_t N = 0;
    double r = 0.0;
    std::string policy = "exact_all_pairs";
    double diagonal_sum = 0.0;
    double offdiagonal_sum = 0.0;
    double total = 0.0;
    double trunc_bound = 0.0;
    double wall_time_s = 0.0;
    std::size_t distinct_pairs = 0;

    nlohmann::json to_json() const {
        return {{"N", N},         {"r", r},         {"policy", policy},           {"diagonal", diagonal_sum},
                {"offdiagonal", offdiagonal_sum}, {"total", total}, {"trunc_bound", trunc_bound},
                {"wall_time_s", wall_time_s}};
    }
};

/// Sum of all diagonal and pair terms. The schedule (row blocks, compensated
/// partial sums, ordered reduction) does not depend on the thread count, so
/// results are bitwise reproducible.
inline EnergyBreakdown assemble_energy(const ParticleConfiguration& c, const EnergyOptions& opt = {}) {
    detail::require_energy_geometry(c);
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t N = c.N();
    const double R = c.radius();
    const double n23 = 1.0 / (c.scale() * c.scale());
    const bool cutoff = opt.policy == EnergyPolicy::cutoff;
    if (cutoff && !(opt.cutoff_radius > 0.0)) throw PreconditionError("cutoff policy needs a positive radius");

    const std::size_t B = std::max<std::size_t>(1, opt.block_rows);
    const std::size_t nblocks = (N + B - 1) / B;
    std::vector<CompensatedSum> off(nblocks), bound(nblocks);
    std::vector<std::size_t> keys_seen(nblocks, 0);
    std::vector<std::string> errors(nblocks);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        PairCache cache(R);
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) break;
            try {
                for (std::size_t i = b * B; i < std::min(N, (b + 1) * B); ++i) {
                    for (std::size_t j = i + 1; j < N; ++j) {
                        const Vec3 d = c.centers[i] - c.centers[j];
                        const double hi = c.cubes[i].half_width, hj = c.cubes[j].half_width;
                        if (cutoff && d.norm() > opt.cutoff_radius) {
                            const double gap = unit::box_gap(d, hi, hj);
                            if (!(gap > 0.0)) throw PreconditionError("cutoff radius omits touching cubes");
                            const double g2 = gap * gap;
                            bound[b].add(2.0 * kTruncationConstant * (R * R + hi * hi) * (R * R + hj * hj) /
                                         (g2 * g2 * gap));
                            continue;
                        }
                        off[b].add(cache.value(PairCache::key(d, hi, hj)));
                    }
                }
            } catch (const std::exception& e) {
                errors[b] = e.what();
            }
            keys_seen[b] = cache.size();
        }
    };
    const int nt = std::max(1, opt.threads);
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(e);
    }

    CompensatedSum diag, offsum, bsum;
    for (std::size_t i = 0; i < N; ++i) diag.add(unit::diagonal(c.cubes[i].half_width, R));
    for (std::size_t b = 0; b < nblocks; ++b) {
        offsum.add(off[b]);
        bsum.add(bound[b]);
    }
    EnergyBreakdown e;
    e.N = N;
    e.r = c.r;
    e.policy = cutoff ? "cutoff" : "exact_all_pairs";
    e.diagonal_sum = n23 * diag.value();
    // sum over i != j is twice the i < j sum
    e.offdiagonal_sum = 2.0 * n23 * offsum.value();
    e.total = e.diagonal_sum + e.offdiagonal_sum;
    e.trunc_bound = n23 * bsum.value();
    for (auto k : keys_seen) e.distinct_pairs = std::max(e.distinct_pairs, k);
    if (opt.timing) e.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return e;
}

/// v_{N,1}(x) = sum_i U_i(x).
inline Vec3 evaluate_vN1(const Vec3& x, const ParticleConfiguration& c) {
    detail::require_energy_geometry(c);
    const double amp = 1.0 / c.scale();
    const double R = c.radius();
    Vec3 v = Vec3::Zero();
    for (std::size_t i = 0; i < c.N(); ++i) {
        const SphereField s{c.centers[i], R, amp * Vec3::UnitZ()};
        const CubeField q{c.cubes[i], amp * Vec3::UnitZ()};
        v += sphere_field(x, s) - cube_field(x, q);
    }
    return v;
}

inline std::vector<Vec3> evaluate_vN1(const std::vector<Vec3>& xs, const ParticleConfiguration& c) {
    std::vector<Vec3> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(evaluate_vN1(x, c));
    return out;
}

/// Mean sedimentation estimate N^{-2/3} E_1 + E_3.
inline double sed_velocity_estimate(const EnergyBreakdown& e, double continuum_energy) {
    const double s = std::cbrt(static_cast<double>(e.N));
    return e.total / (s * s) + continuum_energy;
}

} // namespace hsettle
