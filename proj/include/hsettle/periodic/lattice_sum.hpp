#pragma once

// Torus cell problem for a simple cubic lattice of spheres (cell size 1,
// radius rho, unit force along the force axis):
//   S(rho) = sum_{m != 0} j0(2 pi |m| rho)^2 (1 - m_a^2/|m|^2) / (4 pi^2 |m|^2).
// Summed by |m|^2 shells. Shell sums use r3(n), the number of lattice points
// with |m|^2 = n, and the cubic-symmetry average of m_a^2/|m|^2 over a shell (1/3).
// The remainder beyond a shell radius is replaced by its continuum integral and
// the estimate is averaged over a tapered window of cut radii to damp the
// lattice-point fluctuation of the cut.

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsettle/core/error.hpp"
#include "hsettle/core/generators.hpp"
#include "hsettle/freespace/energy.hpp"

namespace hsettle {

struct SpectralLatticeSum {
    double rho = 0.0;
    int K = 0;
    double S = 0.0;
    double tail_bound = 0.0;
    std::vector<double> shell_partial; // partial sums after each shell |m|^2 = n, n = 1..K^2

    nlohmann::json to_json() const { return {{"rho", rho}, {"K", K}, {"S", S}, {"tail_bound", tail_bound}}; }
};

namespace detail {

/// r3(n) for n <= K^2.
inline std::vector<std::int64_t> r3_counts(int K) {
    const std::int64_t n2 = static_cast<std::int64_t>(K) * K;
    std::vector<std::int64_t> r2(n2 + 1, 0), r3(n2 + 1, 0);
    for (std::int64_t a = -K; a <= K; ++a) {
        for (std::int64_t b = -K; b <= K; ++b) {
            const std::int64_t s = a * a + b * b;
            if (s <= n2) ++r2[s];
        }
    }
    for (std::int64_t c = -K; c <= K; ++c) {
        const std::int64_t c2 = c * c;
        for (std::int64_t s = 0; s + c2 <= n2; ++s) r3[s + c2] += r2[s];
    }
    return r3;
}

inline double j0(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

/// Continuum integral of the summand over |m| > Rc.
inline double continuum_tail(double Rc, double rho) {
    const double a = 2.0 * kPi * Rc * rho;
    const double I = (std::sin(a) * std::sin(a) / a + kPi / 2.0 - gsl_sf_Si(2.0 * a)) / rho;
    return (8.0 * kPi / 3.0) * I / std::pow(2.0 * kPi, 3);
}

struct ShellSums {
    std::vector<double> partial;
    double windowed = 0.0;
};

inline ShellSums shell_sums(double rho, int K) {
    const auto r3 = r3_counts(K);
    const std::int64_t n2 = static_cast<std::int64_t>(K) * K;
    ShellSums out;
    out.partial.resize(n2);
    CompensatedSum s;
    for (std::int64_t n = 1; n <= n2; ++n) {
        if (r3[n] != 0) {
            const double t = 2.0 * kPi * std::sqrt(static_cast<double>(n)) * rho;
            const double j = j0(t);
            s.add((2.0 / 3.0) * static_cast<double>(r3[n]) * j * j / (4.0 * kPi * kPi * static_cast<double>(n)));
        }
        out.partial[n - 1] = s.value();
    }
    // sin^2-tapered window of cut radii Rc^2 = m + 1/2, m in [(K/2)^2, K^2)
    const std::int64_t m0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(K / 2) * (K / 2));
    const double span = static_cast<double>(n2 - m0);
    CompensatedSum w, wsum;
    for (std::int64_t m = m0; m < n2; ++m) {
        const double sn = std::sin(kPi * (static_cast<double>(m - m0) + 0.5) / span);
        const double wt = sn * sn;
        w.add(wt * (out.partial[m - 1] + continuum_tail(std::sqrt(static_cast<double>(m) + 0.5), rho)));
        wsum.add(wt);
    }
    out.windowed = w.value() / wsum.value();
    return out;
}

} // namespace detail

/// S(rho) at a fixed truncation K, no tolerance loop. The tail bound is twice
/// the larger of the last two halving differences (an a-posteriori estimate).
inline SpectralLatticeSum lattice_energy_at(double rho, int K) {
    if (!(rho > 0.0 && rho < 0.5)) throw PreconditionError("rho must lie in (0, 1/2)");
    if (K < 8) throw PreconditionError("truncation K must be at least 8");
    const auto full = detail::shell_sums(rho, K);
    const double half = detail::shell_sums(rho, K / 2).windowed;
    const double quarter = detail::shell_sums(rho, K / 4).windowed;
    SpectralLatticeSum out;
    out.rho = rho;
    out.K = K;
    out.S = full.windowed;
    out.tail_bound = 2.0 * std::max(std::abs(full.windowed - half), std::abs(half - quarter));
    out.shell_partial = full.partial;
    return out;
}

/// S(rho) with K doubled from K0 until tail_bound < tol * S.
inline SpectralLatticeSum lattice_energy(double rho, double tol, int K0 = 32, int Kmax = 1024) {
    if (!(tol > 0.0)) throw PreconditionError("tolerance must be positive");
    SpectralLatticeSum s;
    for (int K = K0; K <= Kmax; K *= 2) {
        s = lattice_energy_at(rho, K);
        if (s.tail_bound < tol * s.S) return s;
    }
    throw AccuracyError("lattice sum tail bound above tolerance at maximal K", s.tail_bound);
}

/// Scaling law S(r, d) = S(r/d)/d.
inline double lattice_energy_scaled(double r, double d, double tol) { return lattice_energy(r / d, tol).S / d; }

/// Plain sum over the ball |m| <= K with an explicit force axis. No tail.
inline double lattice_energy_direct(double rho, int K, int axis = 2) {
    if (axis < 0 || axis > 2) throw PreconditionError("axis must be 0, 1 or 2");
    const std::int64_t n2 = static_cast<std::int64_t>(K) * K;
    CompensatedSum s;
    for (int a = -K; a <= K; ++a) {
        for (int b = -K; b <= K; ++b) {
            for (int c = -K; c <= K; ++c) {
                const std::int64_t n = std::int64_t(a) * a + std::int64_t(b) * b + std::int64_t(c) * c;
                if (n == 0 || n > n2) continue;
                const int m[3] = {a, b, c};
                const double t = 2.0 * kPi * std::sqrt(static_cast<double>(n)) * rho;
                const double j = detail::j0(t);
                const double proj = 1.0 - double(m[axis]) * m[axis] / static_cast<double>(n);
                s.add(j * j * proj / (4.0 * kPi * kPi * static_cast<double>(n)));
            }
        }
    }
    return s.value();
}

struct HasimotoEstimate {
    double a_per = 0.0;
    double slope = 0.0;
    double fit_residual = 0.0;
    std::vector<double> rho;
    std::vector<double> a;
    std::optional<std::string> warning;

    nlohmann::json to_json() const {
        nlohmann::json j{{"a_per", a_per}, {"slope", slope}, {"residual", fit_residual}, {"rho", rho}, {"a", a}};
        if (warning) j["warning"] = *warning;
        return j;
    }
};

/// a(rho) = (1 - 6 pi rho S(rho))/rho, extrapolated linearly to rho -> 0.
inline HasimotoEstimate a_per_estimate(const std::vector<double>& rho_list, double tol = 1e-8) {
    if (rho_list.size() < 3) throw PreconditionError("a_per_estimate needs at least 3 values of rho");
    for (std::size_t i = 0; i < rho_list.size(); ++i) {
        if (!(rho_list[i] > 1e-4 && rho_list[i] < 0.05)) throw PreconditionError("rho outside (1e-4, 0.05)");
        if (i > 0 && !(rho_list[i] < rho_list[i - 1])) throw PreconditionError("rho list must be decreasing");
    }
    HasimotoEstimate h;
    h.rho = rho_list;
    for (double rho : rho_list) h.a.push_back((1.0 - 6.0 * kPi * rho * lattice_energy(rho, tol).S) / rho);
    const double n = static_cast<double>(h.rho.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < h.rho.size(); ++i) {
        sx += h.rho[i];
        sy += h.a[i];
        sxx += h.rho[i] * h.rho[i];
        sxy += h.rho[i] * h.a[i];
    }
    h.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    h.a_per = (sy - h.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < h.rho.size(); ++i) {
        const double e = h.a[i] - (h.a_per + h.slope * h.rho[i]);
        rss += e * e;
    }
    h.fit_residual = std::sqrt(rss / n);
    bool up = true, down = true;
    for (std::size_t i = 1; i < h.a.size(); ++i) {
        up = up && h.a[i] >= h.a[i - 1];
        down = down && h.a[i] <= h.a[i - 1];
    }
    if (!up && !down) h.warning = "a(rho) is not monotone; extrapolation ill-conditioned";
    return h;
}

struct TorusComparison {
    double freespace_norm = 0.0;
    double torus_norm = 0.0;
    double gap = 0.0;
    EnergyBreakdown energy;
};

/// Lattice of M^3 cells (spacing 1/M, radius ratio r, d = 1 in rescaled units)
/// compared with the torus cell problem.
inline TorusComparison torus_vs_freespace(int M, double r, double tol, const EnergyOptions& opt = {}) {
    const ParticleConfiguration c = generate_cubic_lattice(M, r, Domain::unit_cube());
    TorusComparison t;
    t.energy = assemble_energy(c, opt);
    const double s = c.scale();
    t.freespace_norm = t.energy.total / (s * s);
    t.torus_norm = lattice_energy(r, tol).S;
    t.gap = std::abs(t.freespace_norm - t.torus_norm);
    return t;
}

} // namespace hsettle
