#pragma once

// Staggered (MAC) Stokes solver on an axis-aligned box with zero velocity on
// the whole boundary. Velocity component d lives on the interior d-faces,
// pressure at cell centers. Each velocity block of -Lap is inverted exactly by
// a sine transform; the pressure Schur complement -D A^{-1} G is solved by CG.

#include <array>
#include <functional>
#include <memory>

#include "hsettle/continuum/grid.hpp"
#include "hsettle/continuum/transforms.hpp"
#include "hsettle/core/configuration.hpp"

namespace hsettle {

struct MacGrid {
    AxisBox box;
    double h = 0.0;
    std::array<int, 3> n{}; // cells per axis

    static MacGrid make(const AxisBox& box, double h) {
        MacGrid g;
        g.box = box;
        g.h = h;
        for (int k = 0; k < 3; ++k) {
            const double L = box.axes[k].length();
            const double c = std::round(L / h);
            if (c < 2.0 || std::abs(c * h - L) > 1e-9 * L) throw PreconditionError("box length not a multiple of h");
            g.n[k] = static_cast<int>(c);
        }
        return g;
    }

    /// Array shape of velocity component d.
    std::array<int, 3> shape(int d) const {
        std::array<int, 3> m = n;
        m[d] -= 1;
        return m;
    }
    std::size_t size(int d) const {
        const auto m = shape(d);
        return static_cast<std::size_t>(m[0]) * m[1] * m[2];
    }
    std::size_t cells() const { return static_cast<std::size_t>(n[0]) * n[1] * n[2]; }

    /// Center of the control volume of unknown (i, j, k) of component d.
    Vec3 face_point(int d, int i, int j, int k) const {
        const std::array<int, 3> idx{i, j, k};
        Vec3 x;
        for (int a = 0; a < 3; ++a) x[a] = box.axes[a].lo + (a == d ? idx[a] + 1.0 : idx[a] + 0.5) * h;
        return x;
    }
};

/// Face-centered forcing, one array per velocity component.
using MacForcing = std::array<std::vector<double>, 3>;

/// n e_dir averaged over each face control volume (exact for piecewise-constant n).
inline MacForcing forcing_from_density(const DensityField& n, const MacGrid& g, int dir = 2) {
    if (dir < 0 || dir > 2) throw PreconditionError("direction must be 0, 1 or 2");
    for (const auto& p : n.pieces) {
        if (p.value == 0.0) continue;
        for (int k = 0; k < 3; ++k) {
            if (p.box.axes[k].lo < g.box.axes[k].lo - 1e-12 || p.box.axes[k].hi > g.box.axes[k].hi + 1e-12)
                throw DomainMismatch("density support leaves the solver box");
        }
    }
    MacForcing f;
    for (int d = 0; d < 3; ++d) f[d].assign(g.size(d), 0.0);
    const auto m = g.shape(dir);
    const double vol = g.h * g.h * g.h;
    for (const auto& p : n.pieces) {
        if (p.value == 0.0) continue;
        // index range of control volumes that can overlap the piece
        std::array<int, 2> range[3];
        for (int a = 0; a < 3; ++a) {
            const double off = a == dir ? 1.0 : 0.5;
            const double lo = (p.box.axes[a].lo - g.box.axes[a].lo) / g.h - off - 0.5;
            const double hi = (p.box.axes[a].hi - g.box.axes[a].lo) / g.h - off + 0.5;
            range[a] = {std::max(0, static_cast<int>(std::floor(lo))), std::min(m[a] - 1, static_cast<int>(std::ceil(hi)))};
        }
        for (int i = range[0][0]; i <= range[0][1]; ++i) {
            for (int j = range[1][0]; j <= range[1][1]; ++j) {
                for (int k = range[2][0]; k <= range[2][1]; ++k) {
                    const Vec3 c = g.face_point(dir, i, j, k);
                    AxisBox cv;
                    for (int a = 0; a < 3; ++a) cv.axes[a] = Interval{c[a] - 0.5 * g.h, c[a] + 0.5 * g.h};
                    const double ov = cv.overlap_volume(p.box);
                    if (ov > 0.0) f[dir][(static_cast<std::size_t>(i) * m[1] + j) * m[2] + k] += p.value * ov / vol;
                }
            }
        }
    }
    return f;
}

/// Pointwise samples of a vector field at the face control-volume centers.
inline MacForcing forcing_from_function(const std::function<Vec3(const Vec3&)>& fn, const MacGrid& g) {
    MacForcing f;
    for (int d = 0; d < 3; ++d) {
        const auto m = g.shape(d);
        f[d].resize(g.size(d));
        for (int i = 0; i < m[0]; ++i) {
            for (int j = 0; j < m[1]; ++j) {
                for (int k = 0; k < m[2]; ++k) {
                    f[d][(static_cast<std::size_t>(i) * m[1] + j) * m[2] + k] = fn(g.face_point(d, i, j, k))[d];
                }
            }
        }
    }
    return f;
}

struct StokesOptions {
    double outer_tol = 1e-10; // relative Schur residual (= discrete divergence)
    int max_iterations = 20000;
};

class MacStokes {
public:
    explicit MacStokes(const MacGrid& g) : g_(g) {
        for (int d = 0; d < 3; ++d) {
            const auto m = g.shape(d);
            std::array<SineKind, 3> kinds{SineKind::center, SineKind::center, SineKind::center};
            kinds[d] = SineKind::node;
            solvers_[d] = std::make_unique<SineTransform<3>>(m, kinds);
        }
    }

    const MacGrid& grid() const { return g_; }

    /// u_d <- (-Lap)^{-1} u_d for each component.
    void apply_inverse_laplacian(MacForcing& u) {
        const double h2 = g_.h * g_.h;
        for (int d = 0; d < 3; ++d) {
            const auto m = g_.shape(d);
            const auto kinds = solvers_[d]->kinds();
            solvers_[d]->solve(u[d], [&](const std::array<int, 3>& q) {
                return (dirichlet_symbol(kinds[0], m[0], q[0]) + dirichlet_symbol(kinds[1], m[1], q[1]) +
                        dirichlet_symbol(kinds[2], m[2], q[2])) /
                       h2;
            });
        }
    }

    /// Face gradient of a cell field (interior faces only).
    MacForcing gradient(const std::vector<double>& p) const {
        MacForcing out;
        for (int d = 0; d < 3; ++d) {
            const auto m = g_.shape(d);
            out[d].resize(g_.size(d));
            for (int i = 0; i < m[0]; ++i) {
                for (int j = 0; j < m[1]; ++j) {
                    for (int k = 0; k < m[2]; ++k) {
                        std::array<int, 3> lo{i, j, k}, hi{i, j, k};
                        hi[d] += 1;
                        out[d][(static_cast<std::size_t>(i) * m[1] + j) * m[2] + k] =
                            (p[cell(hi)] - p[cell(lo)]) / g_.h;
                    }
                }
            }
        }
        return out;
    }

    /// Cell divergence of a face field with zero boundary normal velocity.
    std::vector<double> divergence(const MacForcing& u) const {
        std::vector<double> out(g_.cells(), 0.0);
        for (int d = 0; d < 3; ++d) {
            const auto m = g_.shape(d);
            for (int i = 0; i < m[0]; ++i) {
                for (int j = 0; j < m[1]; ++j) {
                    for (int k = 0; k < m[2]; ++k) {
                        const double v = u[d][(static_cast<std::size_t>(i) * m[1] + j) * m[2] + k] / g_.h;
                        std::array<int, 3> lo{i, j, k}, hi{i, j, k};
                        hi[d] += 1;
                        out[cell(lo)] += v; // face is the high side of cell lo
                        out[cell(hi)] -= v;
                    }
                }
            }
        }
        return out;
    }

    /// Discrete Dirichlet inner product sum_d int grad u_d . grad v_d, with the
    /// half-cell wall differences of the tangential components.
    double dirichlet(const MacForcing& u, const MacForcing& v) const {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
            const auto m = g_.shape(d);
            auto at = [&](const MacForcing& w, int i, int j, int k) {
                return w[d][(static_cast<std::size_t>(i) * m[1] + j) * m[2] + k];
            };
            for (int a = 0; a < 3; ++a) {
                for (int i = 0; i < m[0]; ++i) {
                    for (int j = 0; j < m[1]; ++j) {
                        for (int k = 0; k < m[2]; ++k) {
                            std::array<int, 3> q{i, j, k};
                            const double ui = at(u, i, j, k), vi = at(v, i, j, k);
                            if (q[a] + 1 < m[a]) {
                                std::array<int, 3> r = q;
                                r[a] += 1;
                                s += (at(u, r[0], r[1], r[2]) - ui) * (at(v, r[0], r[1], r[2]) - vi);
                            }
                            const bool first = q[a] == 0, last = q[a] + 1 == m[a];
                            const double wall = a == d ? 1.0 : 2.0; // node: full edge to 0; center: ghost -u
                            if (first) s += wall * ui * vi;
                            if (last) s += wall * ui * vi;
                        }
                    }
                }
            }
        }
        return s * g_.h;
    }

    double pairing(const MacForcing& f, const MacForcing& u) const {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
            for (std::size_t q = 0; q < f[d].size(); ++q) s += f[d][q] * u[d][q];
        }
        return s * g_.h * g_.h * g_.h;
    }

    GridSolution solve(const MacForcing& f, const StokesOptions& opt = {}) {
        const std::size_t nc = g_.cells();
        MacForcing af = f;
        apply_inverse_laplacian(af);
        std::vector<double> b = divergence(af);
        for (double& x : b) x = -x;
        remove_mean(b);
        const double bnorm = norm(b);

        std::vector<double> p(nc, 0.0), r = b, dir = r;
        double rr = dot(r, r);
        int it = 0;
        if (bnorm > 0.0) {
            while (std::sqrt(rr) > opt.outer_tol * bnorm) {
                if (it >= opt.max_iterations) throw IterativeFailure("Stokes Schur CG did not converge", std::sqrt(rr) / bnorm);
                std::vector<double> q = schur(dir);
                const double alpha = rr / dot(dir, q);
                for (std::size_t c = 0; c < nc; ++c) {
                    p[c] += alpha * dir[c];
                    r[c] -= alpha * q[c];
                }
                remove_mean(r);
                const double rr_new = dot(r, r);
                const double beta = rr_new / rr;
                rr = rr_new;
                for (std::size_t c = 0; c < nc; ++c) dir[c] = r[c] + beta * dir[c];
                ++it;
            }
        }
        MacForcing u = f;
        const MacForcing gp = gradient(p);
        for (int d = 0; d < 3; ++d) {
            for (std::size_t q = 0; q < u[d].size(); ++q) u[d][q] -= gp[d][q];
        }
        apply_inverse_laplacian(u);
        const auto div = divergence(u);

        GridSolution s;
        s.h = g_.h;
        s.names = {"u1", "u2", "u3", "p"};
        for (int d = 0; d < 3; ++d) {
            const auto m = g_.shape(d);
            s.shapes.push_back({m[0], m[1], m[2]});
            const Vec3 o = g_.face_point(d, 0, 0, 0);
            s.origins.push_back({o[0], o[1], o[2]});
            s.fields.push_back(u[d]);
        }
        s.shapes.push_back({g_.n[0], g_.n[1], g_.n[2]});
        s.origins.push_back({g_.box.axes[0].lo + 0.5 * g_.h, g_.box.axes[1].lo + 0.5 * g_.h, g_.box.axes[2].lo + 0.5 * g_.h});
        s.fields.push_back(p);
        s.iterations = it;
        s.residual = bnorm > 0.0 ? std::sqrt(rr) / bnorm : 0.0;
        for (double x : div) s.max_divergence = std::max(s.max_divergence, std::abs(x));
        s.energy = dirichlet(u, u);
        s.pairing = pairing(f, u);
        return s;
    }

    static MacForcing velocity(const GridSolution& s) { return {s.fields[0], s.fields[1], s.fields[2]}; }

private:
    std::size_t cell(const std::array<int, 3>& c) const {
        return (static_cast<std::size_t>(c[0]) * g_.n[1] + c[1]) * g_.n[2] + c[2];
    }
    std::vector<double> schur(const std::vector<double>& p) {
        MacForcing gp = gradient(p);
        apply_inverse_laplacian(gp);
        std::vector<double> out = divergence(gp);
        for (double& x : out) x = -x;
        remove_mean(out);
        return out;
    }
    static void remove_mean(std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        for (double& x : v) x -= m;
    }
    static double dot(const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

    MacGrid g_;
    std::array<std::unique_ptr<SineTransform<3>>, 3> solvers_;
};

/// Duct cross-section times [z0, z0 + length] along the axis.
inline AxisBox truncated_duct(const Domain& d, double z0, double length) {
    if (d.kind != DomainKind::duct) throw PreconditionError("truncated_duct needs a duct domain");
    AxisBox b{{d.extents[0], d.extents[1], Interval{z0, z0 + length}}};
    return b;
}

/// Solves -Lap v + grad q = n e_dir in `box` with v = 0 on the boundary.
inline GridSolution solve_stokes_box(const DensityField& n, const AxisBox& box, double h, int dir = 2,
                                     const StokesOptions& opt = {}) {
    n.validate();
    const MacGrid g = MacGrid::make(box, h);
    MacStokes solver(g);
    return solver.solve(forcing_from_density(n, g, dir), opt);
}

/// V_* . e_k = int grad v_*[e3] : grad v_*[e_k], k = 1..3.
inline Vec3 mean_velocity_matrix(const DensityField& n, const AxisBox& box, double h, const StokesOptions& opt = {}) {
    n.validate();
    const MacGrid g = MacGrid::make(box, h);
    MacStokes solver(g);
    std::array<MacForcing, 3> v;
    for (int k = 0; k < 3; ++k) v[k] = MacStokes::velocity(solver.solve(forcing_from_density(n, g, k), opt));
    Vec3 out;
    for (int k = 0; k < 3; ++k) out[k] = solver.dirichlet(v[2], v[k]);
    return out;
}

} // namespace hsettle
