#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "hsettle/core/configuration.hpp"

namespace hsettle {

struct Separation {
    double c_pair = std::numeric_limits<double>::infinity();
    double c_wall = std::numeric_limits<double>::infinity();
};

/// Smallest center distance and wall distance, both scaled by N^{1/3}.
inline Separation min_separation(const ParticleConfiguration& c) {
    if (c.N() == 0) throw PreconditionError("min_separation needs N >= 1");
    Separation s;
    const auto& x = c.centers;
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][0] < x[b][0]; });
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < order.size(); ++a) {
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            if (x[order[b]][0] - x[order[a]][0] >= best) break;
            best = std::min(best, (x[order[a]] - x[order[b]]).norm());
        }
    }
    double wall = std::numeric_limits<double>::infinity();
    for (const auto& p : x) wall = std::min(wall, c.domain.wall_distance(p));
    const double scale = c.scale();
    s.c_pair = best * scale;
    s.c_wall = wall * scale;
    return s;
}

struct WinfBound {
    double bound = 0.0;
    bool certified = false; // cells partition supp(n) with mass 1/N each
};

namespace detail {

inline bool boxes_pairwise_disjoint(const std::vector<AxisBox>& boxes) {
    std::vector<std::size_t> order(boxes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return boxes[a].axes[0].lo < boxes[b].axes[0].lo; });
    for (std::size_t a = 0; a < order.size(); ++a) {
        const AxisBox& A = boxes[order[a]];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const AxisBox& B = boxes[order[b]];
            if (B.axes[0].lo >= A.axes[0].hi) break;
            if (A.overlap_volume(B) > 1e-14 * std::min(A.volume(), B.volume())) return false;
        }
    }
    return true;
}

} // namespace detail

/// Upper bound for W_inf(rho_N, n) from the cell-to-atom transport map: the
/// largest distance from an atom to a point of its cell.
inline WinfBound winf_upper_bound(const ParticleConfiguration& c, const DensityField& n) {
    if (c.domain.kind != n.domain.kind) throw DomainMismatch("density and configuration live on different domains");
    for (int k = 0; k < 3; ++k) {
        if (!c.domain.bounded(k)) continue;
        if (c.domain.extents[k].lo != n.domain.extents[k].lo || c.domain.extents[k].hi != n.domain.extents[k].hi) {
            throw DomainMismatch("density and configuration live on different domains");
        }
    }
    std::vector<AxisBox> cells = c.transport_cells;
    if (cells.empty()) {
        for (const auto& q : c.cubes) cells.push_back(q.box());
    }
    if (cells.size() != c.N()) throw PreconditionError("no transport cell per particle");

    WinfBound w;
    for (std::size_t i = 0; i < c.N(); ++i) w.bound = std::max(w.bound, cells[i].farthest_distance(c.centers[i]));

    const double target = 1.0 / static_cast<double>(c.N());
    bool exact = true;
    double total = 0.0;
    for (const auto& cell : cells) {
        double m = 0.0;
        for (const auto& p : n.pieces) m += p.value * cell.overlap_volume(p.box);
        total += m;
        if (std::abs(m - target) > 1e-12) exact = false;
    }
    exact = exact && std::abs(total - 1.0) <= 1e-10 && detail::boxes_pairwise_disjoint(cells);
    w.certified = exact;
    return w;
}

} // namespace hsettle
