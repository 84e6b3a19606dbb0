#pragma once

// Executes jobs into records. Jobs run on a small worker pool; each job is
// deterministic, so the sorted output does not depend on completion order or
// thread count. A failing stage marks its record and stops that job only.

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "hsettle/continuum/dual_norm.hpp"
#include "hsettle/continuum/poisson.hpp"
#include "hsettle/continuum/stokes_mac.hpp"
#include "hsettle/freespace/energy.hpp"
#include "hsettle/harness/config.hpp"
#include "hsettle/harness/records.hpp"
#include "hsettle/periodic/lattice_sum.hpp"

namespace hsettle {

inline double stokes_velocity(double r) { return 1.0 / (6.0 * kPi * r); }

/// Integration box for v_*: the domain itself, or the duct cut to `length`
/// around the middle of the density support.
inline AxisBox continuum_box(const DensityField& n, double length) {
    if (n.domain.kind == DomainKind::box) return AxisBox{{n.domain.extents[0], n.domain.extents[1], n.domain.extents[2]}};
    const Interval z = n.support_hull().axes[2];
    return truncated_duct(n.domain, 0.5 * (z.lo + z.hi) - 0.5 * length, length);
}

/// |grad v_*|^2 memoized on (density, box, h); the solve is deterministic, so
/// a cached value is bitwise the recomputed one.
class VstarCache {
public:
    double energy(const DensityField& n, const AxisBox& box, double h) {
        std::string key = fmt17(h);
        for (const auto& a : box.axes) key += "|" + fmt17(a.lo) + "," + fmt17(a.hi);
        for (const auto& p : n.pieces) {
            key += ";" + fmt17(p.value);
            for (const auto& a : p.box.axes) key += "," + fmt17(a.lo) + "," + fmt17(a.hi);
        }
        std::unique_lock lock(m_);
        if (auto it = map_.find(key); it != map_.end()) return it->second;
        lock.unlock();
        const double e = solve_stokes_box(n, box, h).energy;
        lock.lock();
        map_[key] = e;
        return e;
    }

private:
    std::mutex m_;
    std::map<std::string, double> map_;
};

/// Defect energy for a plane defect on {x1 = 0} of the duct (-1,1) x (0,1).
inline double defect_energy(const DensityField& n, int cells_per_unit) {
    if (!n.defect) return 0.0;
    const auto& g = *n.defect;
    const auto& d = n.domain;
    const bool standard = d.kind == DomainKind::duct && g.axis == 0 && g.position == 0.0 && d.extents[0].lo == -1.0 &&
                          d.extents[0].hi == 1.0 && d.extents[1].lo == 0.0 && d.extents[1].hi == 1.0;
    if (!standard) throw PreconditionError("defect solve supports the plane x1 = 0 in the duct (-1,1)x(0,1) only");
    return solve_defect_poisson(g.weight, cells_per_unit).energy;
}

inline ExperimentRecord run_job(const JobSpec& job, const RunConfig& cfg, VstarCache& cache, int energy_threads = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    const json& d = job.descriptor;
    rec.generator = d.value("generator", "");
    rec.r = d.value("r", 0.0);
    rec.lambda = d.value("lambda", 0.0);
    rec.seed = d.value("seed", std::uint64_t{0});
    if (rec.r > 0.0) rec.VSt = stokes_velocity(rec.r);

    GeneratedSystem sys;
    EnergyBreakdown e;
    Stage current = Stage::generate;
    try {
        for (Stage s : plan_stages(job.pipelines)) {
            current = s;
            switch (s) {
            case Stage::generate:
                sys = generate_from_json(d);
                rec.N = sys.config.N();
                break;
            case Stage::energy: {
                EnergyOptions opt;
                opt.threads = energy_threads;
                e = assemble_energy(sys.config, opt);
                rec.E_freespace = e.total;
                break;
            }
            case Stage::torus:
                if (rec.generator != "lattice") throw PreconditionError("torus comparison needs a cubic lattice");
                rec.E_torus = lattice_energy(rec.r, cfg.continuum.lattice_tol).S;
                break;
            case Stage::defect:
                rec.E_defect = defect_energy(sys.density, cfg.continuum.defect_cells);
                break;
            case Stage::vstar:
                rec.E_vstar =
                    cache.energy(sys.density, continuum_box(sys.density, cfg.continuum.truncation), cfg.continuum.h);
                break;
            case Stage::norms: {
                ParticleConfiguration c = sys.config;
                for (auto& q : c.cubes) q.half_width *= cfg.continuum.norm_cube_shrink;
                const auto nn = empirical_dual_norms(c, sys.density, cfg.continuum.norm_cells, cfg.continuum.norm_pad);
                rec.norm_rho_sigma = nn.rho_sigma;
                rec.norm_sigma_n = nn.sigma_n;
                break;
            }
            case Stage::estimate: {
                // E_3 = |grad v_{inf,3}|^2 + N^{2/3} |grad v_*|^2
                const double s = sys.config.scale();
                rec.Vsed_est = sed_velocity_estimate(e, rec.E_defect + s * s * rec.E_vstar);
                break;
            }
            }
        }
        rec.validate();
    } catch (const std::exception& ex) {
        rec.status = csv_safe(std::string("error: ") + stage_name(current) + ": " + ex.what());
    }
    if (cfg.timing) rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

inline std::vector<ExperimentRecord> run_jobs(const std::vector<JobSpec>& jobs, const RunConfig& cfg,
                                              VstarCache& cache) {
    std::vector<ExperimentRecord> out(jobs.size());
    const int workers = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs.size())));
    const int energy_threads = std::max(1, cfg.threads / workers);
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            out[i] = run_job(jobs[i], cfg, cache, energy_threads);
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    sort_records(out);
    return out;
}

inline std::vector<ExperimentRecord> run(const RunConfig& cfg) {
    VstarCache cache;
    return run_jobs(cfg.jobs, cfg, cache);
}

inline bool all_ok(const std::vector<ExperimentRecord>& rs) {
    return std::all_of(rs.begin(), rs.end(), [](const auto& r) { return r.ok(); });
}

inline void write_outputs(const std::filesystem::path& dir, const std::vector<ExperimentRecord>& rs,
                          const json& verdicts) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "records.csv", std::ios::binary);
        write_records_csv(csv, rs);
    }
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(record_to_json(r));
    std::ofstream(dir / "records.json", std::ios::binary) << arr.dump(2) << "\n";
    std::ofstream(dir / "verdicts.json", std::ios::binary) << verdicts.dump(2) << "\n";
}

} // namespace hsettle
