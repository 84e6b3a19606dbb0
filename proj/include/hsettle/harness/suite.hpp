#pragma once

// Verdicts over record sets, and the two-branch scaling suite:
//   well-prepared: lattice, |V - V_St| bounded with no growth in M;
//   ill-prepared:  half-filled duct, N^{-2/3} V -> |grad v_*|^2 at the largest M;
//   r sweep:       relative residual |V/V_St - 1| shrinks like a power of r.

#include <cmath>
#include <string>
#include <vector>

#include "hsettle/harness/fit.hpp"
#include "hsettle/harness/runner.hpp"

namespace hsettle {

struct Verdict {
    std::string name;
    bool pass = false;
    json data;

    json to_json() const { return {{"name", name}, {"pass", pass}, {"data", data}}; }
};

inline json verdicts_to_json(const std::vector<Verdict>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back(v.to_json());
    return a;
}

namespace detail {

inline Verdict failed_records(const std::string& name, const std::vector<ExperimentRecord>& rs) {
    Verdict v{name, false, {{"reason", "record failures"}}};
    for (const auto& r : rs) {
        if (!r.ok()) v.data["errors"].push_back(r.status);
    }
    return v;
}

inline double n23(std::size_t N) {
    const double s = std::cbrt(static_cast<double>(N));
    return s * s;
}

inline int lattice_M(const ExperimentRecord& r) { return static_cast<int>(std::lround(std::cbrt(static_cast<double>(r.N)))); }

} // namespace detail

/// |V - V_St| over lattice sizes: fitted M-exponent within the band and all
/// deviations below the configured bound.
inline Verdict verdict_well_prepared(const std::vector<ExperimentRecord>& rs, const Thresholds& t) {
    if (!all_ok(rs)) return detail::failed_records("well_prepared_bounded", rs);
    std::vector<std::pair<double, double>> pts;
    json rows = json::array();
    double worst = 0.0;
    for (const auto& r : rs) {
        const double dev = std::abs(r.Vsed_est - r.VSt);
        worst = std::max(worst, dev);
        pts.push_back({static_cast<double>(detail::lattice_M(r)), dev});
        rows.push_back({{"N", r.N}, {"Vsed_est", r.Vsed_est}, {"VSt", r.VSt}, {"deviation", dev}});
    }
    Verdict v{"well_prepared_bounded", false, {{"rows", rows}}};
    if (pts.size() < 2) {
        v.data["reason"] = "need at least two lattice sizes";
        return v;
    }
    const PowerLawFit f = fit_power_law(pts);
    v.data["fit_M"] = f.to_json();
    v.data["max_deviation"] = worst;
    v.data["band"] = t.well_exponent_band;
    v.data["bound"] = t.well_bound;
    v.pass = std::abs(f.exponent) <= t.well_exponent_band && worst <= t.well_bound;
    return v;
}

/// N^{-2/3} V against |grad v_*|^2 at the largest N, plus grid self-convergence
/// (E_coarse at 2h against the reported E at h).
inline Verdict verdict_ill_prepared(const std::vector<ExperimentRecord>& rs, double E_coarse, const Thresholds& t) {
    if (!all_ok(rs)) return detail::failed_records("ill_prepared_scaling", rs);
    Verdict v{"ill_prepared_scaling", false, {}};
    if (rs.empty()) {
        v.data["reason"] = "no records";
        return v;
    }
    json rows = json::array();
    const ExperimentRecord* last = &rs.front();
    for (const auto& r : rs) {
        const double ratio = r.Vsed_est / detail::n23(r.N) / r.E_vstar;
        rows.push_back({{"N", r.N}, {"scaled_V", r.Vsed_est / detail::n23(r.N)}, {"E_vstar", r.E_vstar},
                        {"ratio", ratio}});
        if (r.N > last->N) last = &r;
    }
    const double E = last->E_vstar;
    const double ratio = last->Vsed_est / detail::n23(last->N) / E;
    const double conv = std::abs(E_coarse - E) / E;
    v.data = {{"rows", rows},           {"largest_N", last->N},        {"ratio_at_largest", ratio},
              {"E_vstar_h", E},         {"E_vstar_2h", E_coarse},      {"self_convergence", conv},
              {"band", t.ill_energy_band}, {"convergence_band", t.self_convergence}};
    v.pass = E > 0.0 && std::abs(ratio - 1.0) <= t.ill_energy_band && conv <= t.self_convergence;
    return v;
}

/// Relative residual |V/V_St - 1| against r: fitted exponent at least the minimum.
inline Verdict verdict_r_sweep(const std::vector<ExperimentRecord>& rs, const Thresholds& t) {
    if (!all_ok(rs)) return detail::failed_records("r_sweep_residual", rs);
    std::vector<std::pair<double, double>> pts;
    json rows = json::array();
    for (const auto& r : rs) {
        const double res = std::abs(r.Vsed_est / r.VSt - 1.0);
        pts.push_back({r.r, res});
        rows.push_back({{"r", r.r}, {"Vsed_est", r.Vsed_est}, {"VSt", r.VSt}, {"relative_residual", res}});
    }
    Verdict v{"r_sweep_residual", false, {{"rows", rows}, {"minimum_exponent", t.residual_exponent_min}}};
    if (pts.size() < 2) {
        v.data["reason"] = "need at least two radii";
        return v;
    }
    const PowerLawFit f = fit_power_law(pts);
    v.data["fit_r"] = f.to_json();
    v.pass = f.exponent >= t.residual_exponent_min;
    return v;
}

/// V = N^{-2/3} E_1 + E_3 with E_3 = E_defect + N^{2/3} E_vstar, per record.
inline Verdict verdict_structure_identity(const std::vector<ExperimentRecord>& rs) {
    if (!all_ok(rs)) return detail::failed_records("structure_identity", rs);
    double worst = 0.0;
    for (const auto& r : rs) {
        const double s = detail::n23(r.N);
        const double rebuilt = r.E_freespace / s + r.E_defect + s * r.E_vstar;
        worst = std::max(worst, std::abs(r.Vsed_est - rebuilt) / std::abs(r.Vsed_est));
    }
    return {"structure_identity", !rs.empty() && worst <= 1e-12, {{"max_relative_mismatch", worst}, {"records", rs.size()}}};
}

/// Free-space vs torus: gap at the largest M below gap at the smallest, and
/// relative gap below the threshold.
inline Verdict verdict_torus_gap(const std::vector<ExperimentRecord>& rs, const Thresholds& t) {
    if (!all_ok(rs)) return detail::failed_records("torus_gap", rs);
    Verdict v{"torus_gap", false, {}};
    json rows = json::array();
    const ExperimentRecord *lo = nullptr, *hi = nullptr;
    for (const auto& r : rs) {
        const double gap = std::abs(r.E_freespace / detail::n23(r.N) - r.E_torus);
        rows.push_back({{"N", r.N}, {"freespace_norm", r.E_freespace / detail::n23(r.N)}, {"torus_norm", r.E_torus},
                        {"gap", gap}});
        if (!lo || r.N < lo->N) lo = &r;
        if (!hi || r.N > hi->N) hi = &r;
    }
    v.data["rows"] = rows;
    if (!lo || lo == hi) {
        v.data["reason"] = "need at least two lattice sizes";
        return v;
    }
    auto gap = [](const ExperimentRecord* r) { return std::abs(r->E_freespace / detail::n23(r->N) - r->E_torus); };
    v.data["relative_gap_at_largest"] = gap(hi) / hi->E_torus;
    v.data["threshold"] = t.torus_gap_ratio;
    v.pass = gap(hi) < gap(lo) && gap(hi) / hi->E_torus < t.torus_gap_ratio;
    return v;
}

/// N-slopes of both dual norms inside [lo, hi].
inline Verdict verdict_norm_slopes(const std::vector<ExperimentRecord>& rs, const Thresholds& t) {
    if (!all_ok(rs)) return detail::failed_records("norm_slopes", rs);
    std::vector<std::pair<double, double>> a, b;
    json rows = json::array();
    for (const auto& r : rs) {
        a.push_back({static_cast<double>(r.N), r.norm_rho_sigma});
        b.push_back({static_cast<double>(r.N), r.norm_sigma_n});
        rows.push_back({{"N", r.N}, {"norm_rho_sigma", r.norm_rho_sigma}, {"norm_sigma_n", r.norm_sigma_n}});
    }
    Verdict v{"norm_slopes", false, {{"rows", rows}, {"band", {t.norm_slope_lo, t.norm_slope_hi}}}};
    if (rs.size() < 2) {
        v.data["reason"] = "need at least two sizes";
        return v;
    }
    const PowerLawFit fa = fit_power_law(a), fb = fit_power_law(b);
    v.data["fit_rho_sigma"] = fa.to_json();
    v.data["fit_sigma_n"] = fb.to_json();
    auto in = [&](double s) { return s >= t.norm_slope_lo && s <= t.norm_slope_hi; };
    v.pass = in(fa.exponent) && in(fb.exponent);
    return v;
}

struct ScalingSuiteSettings {
    double well_r = 0.05;
    std::vector<int> well_M{4, 6, 8};
    double ill_r = 0.2;
    std::vector<int> ill_M{8, 12, 16};
    double ill_h = 1.0 / 32; // reported grid; self-convergence checked at 2h
    int sweep_M = 4;
    double sweep_lambda = 0.25;
    std::vector<double> sweep_r{0.02, 0.04, 0.08};

    static ScalingSuiteSettings from_json(const json& j) {
        ScalingSuiteSettings s;
        if (j.is_null()) return s;
        if (!j.is_object()) throw ConfigError("scaling_suite", "expected an object");
        try {
            if (j.contains("well")) {
                s.well_r = j["well"].value("r", s.well_r);
                s.well_M = j["well"].value("M", s.well_M);
            }
            if (j.contains("ill")) {
                s.ill_r = j["ill"].value("r", s.ill_r);
                s.ill_M = j["ill"].value("M", s.ill_M);
                s.ill_h = j["ill"].value("h", s.ill_h);
            }
            if (j.contains("r_sweep")) {
                s.sweep_M = j["r_sweep"].value("M", s.sweep_M);
                s.sweep_lambda = j["r_sweep"].value("lambda", s.sweep_lambda);
                s.sweep_r = j["r_sweep"].value("r", s.sweep_r);
            }
        } catch (const json::exception& e) {
            throw ConfigError("scaling_suite", e.what());
        }
        return s;
    }
};

struct SuiteReport {
    std::vector<ExperimentRecord> records;
    std::vector<Verdict> verdicts;

    bool pass() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
    }
};

struct BranchResult {
    std::vector<ExperimentRecord> records;
    std::vector<Verdict> verdicts;
};

namespace detail {

inline std::vector<JobSpec> suite_jobs(const char* gen, const std::vector<int>& Ms, const std::vector<double>& rs,
                                       double lambda, const std::vector<std::string>& pipes, std::uint64_t seed) {
    std::vector<JobSpec> out;
    for (int M : Ms) {
        for (double r : rs) {
            json d{{"generator", gen}, {"M", M}, {"r", r}, {"seed", seed}};
            if (lambda > 0.0) d["lambda"] = lambda;
            out.push_back({d, pipes});
        }
    }
    return out;
}

} // namespace detail

inline BranchResult well_prepared_branch(const ScalingSuiteSettings& s, const RunConfig& cfg, VstarCache& cache) {
    BranchResult b;
    b.records = run_jobs(detail::suite_jobs("lattice", s.well_M, {s.well_r}, 0.0, {"energy"}, cfg.seed), cfg, cache);
    b.verdicts.push_back(verdict_well_prepared(b.records, cfg.thresholds));
    return b;
}

/// Records carry |grad v_*|^2 at ill_h; the same solve at 2 ill_h is the
/// self-convergence reference.
inline BranchResult ill_prepared_branch(const ScalingSuiteSettings& s, const RunConfig& cfg, VstarCache& cache) {
    RunConfig fine = cfg;
    fine.continuum.h = s.ill_h;
    BranchResult b;
    b.records =
        run_jobs(detail::suite_jobs("half_duct", s.ill_M, {s.ill_r}, 0.0, {"energy", "vstar"}, cfg.seed), fine, cache);
    double coarse = 0.0;
    try {
        const auto n = generate_half_duct_lattice(s.ill_M.empty() ? 1 : s.ill_M.front(), s.ill_r).second;
        coarse = cache.energy(n, continuum_box(n, cfg.continuum.truncation), 2.0 * s.ill_h);
    } catch (const std::exception&) {
        coarse = 0.0; // the verdict then fails its convergence check
    }
    b.verdicts.push_back(verdict_ill_prepared(b.records, coarse, cfg.thresholds));
    return b;
}

inline BranchResult r_sweep_branch(const ScalingSuiteSettings& s, const RunConfig& cfg, VstarCache& cache) {
    BranchResult b;
    b.records = run_jobs(
        detail::suite_jobs("shifted", {s.sweep_M}, s.sweep_r, s.sweep_lambda, {"energy", "defect"}, cfg.seed), cfg, cache);
    b.verdicts.push_back(verdict_r_sweep(b.records, cfg.thresholds));
    b.verdicts.push_back(verdict_structure_identity(b.records));
    return b;
}

inline SuiteReport theorem1_suite(const ScalingSuiteSettings& s, const RunConfig& cfg) {
    VstarCache cache;
    SuiteReport rep;
    for (auto branch : {well_prepared_branch, ill_prepared_branch, r_sweep_branch}) {
        const BranchResult b = branch(s, cfg, cache);
        rep.records.insert(rep.records.end(), b.records.begin(), b.records.end());
        rep.verdicts.insert(rep.verdicts.end(), b.verdicts.begin(), b.verdicts.end());
    }
    sort_records(rep.records);
    return rep;
}

/// Verdicts that apply to an arbitrary record set: torus gaps over lattice
/// records with a torus value, norm slopes over records with norms.
inline std::vector<Verdict> record_verdicts(const std::vector<ExperimentRecord>& rs, const Thresholds& t) {
    std::vector<ExperimentRecord> torus, norms;
    for (const auto& r : rs) {
        if (r.generator == "lattice" && r.E_torus > 0.0) torus.push_back(r);
        if (r.norm_sigma_n > 0.0 || r.norm_rho_sigma > 0.0) norms.push_back(r);
    }
    std::vector<Verdict> out;
    if (torus.size() >= 2) out.push_back(verdict_torus_gap(torus, t));
    if (norms.size() >= 2) out.push_back(verdict_norm_slopes(norms, t));
    return out;
}

} // namespace hsettle
