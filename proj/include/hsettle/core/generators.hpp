#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <utility>

#include "hsettle/core/configuration.hpp"

namespace hsettle {

namespace detail {

inline AxisBox bounding_unit_cube(const Domain& d) {
    AxisBox b;
    for (int k = 0; k < 3; ++k) {
        const double lo = d.bounded(k) ? d.extents[k].lo : 0.0;
        b.axes[k] = {lo, lo + 1.0};
    }
    return b;
}

} // namespace detail

/// M^3 particles at the cell centers of the unit cube anchored at the domain's
/// lower corner; the cells are the cubes Q_i.
inline ParticleConfiguration generate_cubic_lattice(int M, double r, const Domain& domain) {
    if (M < 1) throw PreconditionError("lattice size M must be positive");
    if (!(r > 0.0)) throw PreconditionError("radius ratio must be positive");
    ParticleConfiguration c;
    c.generator = "lattice";
    c.r = r;
    c.separation_c = 1.0;
    c.domain = domain;
    const AxisBox unit = detail::bounding_unit_cube(domain);
    const double h = 1.0 / M;
    const std::size_t n = static_cast<std::size_t>(M) * M * M;
    c.centers.reserve(n);
    c.cubes.reserve(n);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            for (int k = 0; k < M; ++k) {
                const Vec3 x{unit.axes[0].lo + (i + 0.5) * h, unit.axes[1].lo + (j + 0.5) * h,
                             unit.axes[2].lo + (k + 0.5) * h};
                c.centers.push_back(x);
                c.cubes.push_back({x, 0.5 * h});
            }
        }
    }
    const double R = c.radius();
    for (const auto& x : c.centers) {
        if (!domain.contains_ball(x, R)) throw ConfigurationInfeasible("lattice ball leaves the domain");
    }
    for (const auto& q : c.cubes) c.transport_cells.push_back(q.box());
    return c;
}

/// Mirrored shifted lattice in the duct (-1,1)x(0,1)xR: the right half holds
/// centers ((k1+1/2)/M - lambda/M, (k2+1/2)/M, (k3+1/2)/M), the left half their
/// mirror images. Density n = 1/2 on (-1,1)x(0,1)^2 and a plane defect of
/// weight 2^{1/3} lambda on {x1 = 0}.
inline std::pair<ParticleConfiguration, DensityField> generate_shifted_example(int M, double lambda, double r) {
    if (M < 1) throw PreconditionError("lattice size M must be positive");
    if (!(lambda > 0.0 && lambda < 0.5)) throw PreconditionError("lambda must lie in (0, 1/2)");
    if (!(r > 0.0)) throw PreconditionError("radius ratio must be positive");
    ParticleConfiguration c;
    c.generator = "shifted";
    c.r = r;
    c.domain = Domain::duct({-1.0, 1.0}, {0.0, 1.0});
    const double h = 1.0 / M;
    const std::size_t n = 2 * static_cast<std::size_t>(M) * M * M;
    c.centers.reserve(n);
    c.cubes.reserve(n);
    for (int side : {1, -1}) {
        for (int i = 0; i < M; ++i) {
            const double x1 = (i + 0.5) * h - lambda * h;
            const double hw = (i == 0) ? (0.5 - lambda) * h : 0.5 * h;
            for (int j = 0; j < M; ++j) {
                for (int k = 0; k < M; ++k) {
                    const Vec3 x{side * x1, (j + 0.5) * h, (k + 0.5) * h};
                    c.centers.push_back(x);
                    c.cubes.push_back({x, hw});
                    // unshifted cell carrying mass 1/N of n
                    const double a = side > 0 ? i * h : -(i + 1) * h;
                    c.transport_cells.push_back(AxisBox{{Interval{a, a + h}, Interval{j * h, (j + 1) * h},
                                                         Interval{k * h, (k + 1) * h}}});
                }
            }
        }
    }
    const double N = static_cast<double>(n);
    // closest pair is across x1 = 0: 2(1/2 - lambda)/M, or the lattice spacing
    c.separation_c = std::cbrt(N) * std::min(h, (1.0 - 2.0 * lambda) * h);
    const double R = c.radius();
    for (const auto& x : c.centers) {
        if (!c.domain.contains_ball(x, R)) throw ConfigurationInfeasible("shifted ball leaves the domain");
    }

    DensityField d;
    d.domain = c.domain;
    d.pieces.push_back({AxisBox{{Interval{-1.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}}, 0.5});
    d.defect = PlaneDefect{0, 0.0, std::cbrt(2.0) * lambda, Interval{0.0, 1.0}};
    return {c, d};
}

/// Lattice of M^3 cells filling only x1 in (0,1) of the duct (-1,1)x(0,1)xR;
/// its limit density violates the horizontal homogeneity condition.
inline std::pair<ParticleConfiguration, DensityField> generate_half_duct_lattice(int M, double r) {
    const Domain duct = Domain::duct({-1.0, 1.0}, {0.0, 1.0});
    Domain anchor = Domain::box({0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0});
    ParticleConfiguration c = generate_cubic_lattice(M, r, anchor);
    c.generator = "half_duct";
    c.domain = duct;
    DensityField d = DensityField::uniform(AxisBox{{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}}}, duct);
    return {c, d};
}

/// Rejection-sampled hardcore configuration: pairwise distance >= 2R and wall
/// distance >= 2R. Deterministic given the seed.
inline ParticleConfiguration generate_hardcore_poisson(std::size_t N, double r, const Domain& domain,
                                                       std::uint64_t seed, double max_fill = 0.5,
                                                       std::size_t max_attempts = 1000000) {
    if (N < 1) throw PreconditionError("N must be positive");
    if (!(r > 0.0)) throw PreconditionError("radius ratio must be positive");
    if (domain.kind != DomainKind::box) throw PreconditionError("hardcore sampling needs a bounded box");
    const double n = static_cast<double>(N);
    const double R = r / std::cbrt(n);
    const double dmin = 2.0 * R;
    double vol = 1.0;
    for (int k = 0; k < 3; ++k) vol *= domain.extents[k].length() - 2.0 * dmin;
    if (!(vol > 0.0) || n * dmin * dmin * dmin > max_fill * vol) {
        throw PackingInfeasible("requested packing exceeds the configured fill fraction");
    }

    std::mt19937_64 rng(seed);
    auto uniform = [&rng](double lo, double hi) {
        // 53 random bits; avoids implementation-defined distribution algorithms
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    };
    // cell list with cell side >= dmin
    std::array<int, 3> dims{};
    for (int k = 0; k < 3; ++k) {
        dims[k] = std::max(1, static_cast<int>(std::floor(domain.extents[k].length() / dmin)));
        dims[k] = std::min(dims[k], 1024);
    }
    auto cell_of = [&](const Vec3& x) {
        std::array<int, 3> c{};
        for (int k = 0; k < 3; ++k) {
            const double t = (x[k] - domain.extents[k].lo) / domain.extents[k].length();
            c[k] = std::clamp(static_cast<int>(t * dims[k]), 0, dims[k] - 1);
        }
        return c;
    };
    auto key = [&](int a, int b, int c) {
        return (static_cast<std::int64_t>(a) * dims[1] + b) * dims[2] + c;
    };
    std::unordered_map<std::int64_t, std::vector<std::size_t>> grid;

    ParticleConfiguration cfg;
    cfg.generator = "hardcore_poisson";
    cfg.r = r;
    cfg.domain = domain;
    cfg.separation_c = 2.0 * r;
    cfg.centers.reserve(N);
    for (std::size_t p = 0; p < N; ++p) {
        bool placed = false;
        for (std::size_t attempt = 0; attempt < max_attempts && !placed; ++attempt) {
            Vec3 x;
            for (int k = 0; k < 3; ++k) x[k] = uniform(domain.extents[k].lo + dmin, domain.extents[k].hi - dmin);
            const auto c = cell_of(x);
            bool ok = true;
            for (int a = std::max(0, c[0] - 1); ok && a <= std::min(dims[0] - 1, c[0] + 1); ++a) {
                for (int b = std::max(0, c[1] - 1); ok && b <= std::min(dims[1] - 1, c[1] + 1); ++b) {
                    for (int e = std::max(0, c[2] - 1); ok && e <= std::min(dims[2] - 1, c[2] + 1); ++e) {
                        auto it = grid.find(key(a, b, e));
                        if (it == grid.end()) continue;
                        for (std::size_t q : it->second) {
                            if ((cfg.centers[q] - x).norm() < dmin) {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
            }
            if (ok) {
                grid[key(c[0], c[1], c[2])].push_back(cfg.centers.size());
                cfg.centers.push_back(x);
                placed = true;
            }
        }
        if (!placed) throw PackingInfeasible("maximum placement attempts exceeded");
    }
    return cfg;
}

} // namespace hsettle
