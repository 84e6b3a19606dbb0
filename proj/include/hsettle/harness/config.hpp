#pragma once

// Run configuration: sweeps expanded into jobs, the per-job pipeline plan, and
// the verdict thresholds (one section, so acceptance bands live in data).
//
// {
//   "seed": 0, "threads": 1, "timing": false,
//   "continuum": {"h": 0.0625, "truncation": 16, "defect_cells": 256,
//                 "norm_cells": 4, "norm_pad": 0.25},
//   "thresholds": {...},
//   "sweeps": [{"generator": "lattice", "M": [4, 6, 8], "r": [0.05],
//               "pipelines": ["energy", "torus"]}],
//   "scaling_suite": {...}
// }

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsettle/core/error.hpp"
#include "hsettle/core/io.hpp"

namespace hsettle {

struct Thresholds {
    double well_exponent_band = 0.15;  // |fitted M-exponent of |V - V_St|| <= band
    double well_bound = 1.0;           // |V - V_St| <= bound (the existential C)
    double ill_energy_band = 0.10;     // |N^{-2/3} V / |grad v_*|^2 - 1| at the largest M
    double self_convergence = 0.10;    // |E_h - E_{h/2}| / E_{h/2}
    double residual_exponent_min = 0.8;
    double norm_slope_lo = -0.38;
    double norm_slope_hi = -0.28;
    double torus_gap_ratio = 0.15;     // gap(M_max) / torus norm

    static Thresholds from_json(const json& j) {
        Thresholds t;
        if (!j.is_object()) throw ConfigError("thresholds", "expected an object");
        auto get = [&](const char* k, double& v) {
            if (!j.contains(k)) return;
            if (!j[k].is_number()) throw ConfigError(std::string("thresholds.") + k, "expected a number");
            v = j[k].get<double>();
        };
        get("well_exponent_band", t.well_exponent_band);
        get("well_bound", t.well_bound);
        get("ill_energy_band", t.ill_energy_band);
        get("self_convergence", t.self_convergence);
        get("residual_exponent_min", t.residual_exponent_min);
        get("norm_slope_lo", t.norm_slope_lo);
        get("norm_slope_hi", t.norm_slope_hi);
        get("torus_gap_ratio", t.torus_gap_ratio);
        return t;
    }
    json to_json() const {
        return {{"well_exponent_band", well_exponent_band}, {"well_bound", well_bound},
                {"ill_energy_band", ill_energy_band},       {"self_convergence", self_convergence},
                {"residual_exponent_min", residual_exponent_min}, {"norm_slope_lo", norm_slope_lo},
                {"norm_slope_hi", norm_slope_hi},           {"torus_gap_ratio", torus_gap_ratio}};
    }
};

struct ContinuumSettings {
    double h = 1.0 / 16;          // MAC grid spacing for v_*
    double truncation = 16.0;     // duct length kept along the axis
    int defect_cells = 256;       // defect Poisson cells per unit length
    int norm_cells = 4;           // dual-norm nodes per N^{-1/3}
    double norm_pad = 0.25;
    double norm_cube_shrink = 1.0; // cube side factor for the norm measures
    double lattice_tol = 1e-10;

    static ContinuumSettings from_json(const json& j) {
        ContinuumSettings c;
        if (!j.is_object()) throw ConfigError("continuum", "expected an object");
        auto num = [&](const char* k, double& v) {
            if (!j.contains(k)) return;
            if (!j[k].is_number()) throw ConfigError(std::string("continuum.") + k, "expected a number");
            v = j[k].get<double>();
        };
        auto integer = [&](const char* k, int& v) {
            if (!j.contains(k)) return;
            if (!j[k].is_number_integer()) throw ConfigError(std::string("continuum.") + k, "expected an integer");
            v = j[k].get<int>();
        };
        num("h", c.h);
        num("truncation", c.truncation);
        integer("defect_cells", c.defect_cells);
        integer("norm_cells", c.norm_cells);
        num("norm_pad", c.norm_pad);
        num("norm_cube_shrink", c.norm_cube_shrink);
        num("lattice_tol", c.lattice_tol);
        if (!(c.h > 0.0)) throw ConfigError("continuum.h", "must be positive");
        if (!(c.truncation > 0.0)) throw ConfigError("continuum.truncation", "must be positive");
        if (c.defect_cells < 2) throw ConfigError("continuum.defect_cells", "must be >= 2");
        if (c.norm_cells < 1) throw ConfigError("continuum.norm_cells", "must be >= 1");
        if (!(c.norm_cube_shrink > 0.0 && c.norm_cube_shrink <= 1.0))
            throw ConfigError("continuum.norm_cube_shrink", "must lie in (0, 1]");
        return c;
    }
    json to_json() const {
        return {{"h", h},
                {"truncation", truncation},
                {"defect_cells", defect_cells},
                {"norm_cells", norm_cells},
                {"norm_pad", norm_pad},
                {"norm_cube_shrink", norm_cube_shrink},
                {"lattice_tol", lattice_tol}};
    }
};

/// Pipeline stages in dependency order.
enum class Stage { generate, energy, torus, defect, vstar, norms, estimate };

inline const char* stage_name(Stage s) {
    switch (s) {
    case Stage::generate: return "generate";
    case Stage::energy: return "energy";
    case Stage::torus: return "torus";
    case Stage::defect: return "defect";
    case Stage::vstar: return "vstar";
    case Stage::norms: return "norms";
    case Stage::estimate: return "estimate";
    }
    return "?";
}

/// One record to compute: a generator descriptor plus the requested pipelines.
struct JobSpec {
    json descriptor; // {generator, M|N, r, lambda?, seed?, domain?}
    std::vector<std::string> pipelines;
};

inline bool known_pipeline(const std::string& p) {
    return p == "energy" || p == "torus" || p == "defect" || p == "vstar" || p == "norms";
}

/// Stages of a job, closed under dependencies and sorted: torus and estimate
/// need energy, estimate runs last.
inline std::vector<Stage> plan_stages(const std::vector<std::string>& pipelines) {
    std::vector<Stage> s{Stage::generate};
    auto add = [&](Stage x) {
        if (std::find(s.begin(), s.end(), x) == s.end()) s.push_back(x);
    };
    for (const auto& p : pipelines) {
        if (p == "energy") {
            add(Stage::energy);
        } else if (p == "torus") {
            add(Stage::energy);
            add(Stage::torus);
        } else if (p == "defect") {
            add(Stage::defect);
        } else if (p == "vstar") {
            add(Stage::vstar);
        } else if (p == "norms") {
            add(Stage::norms);
        } else {
            throw ConfigError("pipelines", "unknown pipeline '" + p + "'");
        }
    }
    if (std::find(s.begin(), s.end(), Stage::energy) != s.end()) add(Stage::estimate);
    std::sort(s.begin(), s.end());
    return s;
}

struct RunConfig {
    std::uint64_t seed = 0;
    int threads = 1;
    bool timing = false;
    ContinuumSettings continuum;
    Thresholds thresholds;
    std::vector<JobSpec> jobs;
    json scaling_suite; // optional suite section

    static RunConfig from_json(const json& j) {
        if (!j.is_object()) throw ConfigError("<root>", "expected an object");
        RunConfig c;
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("threads")) {
            if (!j["threads"].is_number_integer() || j["threads"].get<int>() < 1)
                throw ConfigError("threads", "expected a positive integer");
            c.threads = j["threads"].get<int>();
        }
        if (j.contains("timing")) c.timing = j["timing"].get<bool>();
        if (j.contains("continuum")) c.continuum = ContinuumSettings::from_json(j["continuum"]);
        if (j.contains("thresholds")) c.thresholds = Thresholds::from_json(j["thresholds"]);
        if (j.contains("scaling_suite")) c.scaling_suite = j["scaling_suite"];
        if (j.contains("sweeps")) {
            if (!j["sweeps"].is_array()) throw ConfigError("sweeps", "expected an array");
            for (std::size_t i = 0; i < j["sweeps"].size(); ++i) {
                const auto jobs = expand_sweep(j["sweeps"][i], "sweeps[" + std::to_string(i) + "]", c.seed);
                c.jobs.insert(c.jobs.end(), jobs.begin(), jobs.end());
            }
        }
        return c;
    }

    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path, "cannot open");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError(path, std::string("parse error: ") + e.what());
        }
        return from_json(j);
    }

    /// Cartesian product over the list-valued keys of one sweep entry.
    static std::vector<JobSpec> expand_sweep(const json& s, const std::string& where, std::uint64_t seed) {
        if (!s.is_object()) throw ConfigError(where, "expected an object");
        if (!s.contains("generator")) throw ConfigError(where + ".generator", "missing");
        std::vector<std::string> pipes;
        if (s.contains("pipelines")) {
            if (!s["pipelines"].is_array()) throw ConfigError(where + ".pipelines", "expected an array");
            for (const auto& p : s["pipelines"]) pipes.push_back(p.get<std::string>());
        }
        for (const auto& p : pipes) {
            if (!known_pipeline(p)) throw ConfigError(where + ".pipelines", "unknown pipeline '" + p + "'");
        }
        std::vector<json> out{json{{"generator", s["generator"]}, {"seed", s.value("seed", seed)}}};
        if (s.contains("domain")) out[0]["domain"] = s["domain"];
        for (const char* k : {"M", "N", "r", "lambda"}) {
            if (!s.contains(k)) continue;
            const json vals = s[k].is_array() ? s[k] : json::array({s[k]});
            if (vals.empty()) return {};
            std::vector<json> next;
            for (const auto& base : out) {
                for (const auto& v : vals) {
                    json d = base;
                    d[k] = v;
                    next.push_back(d);
                }
            }
            out = next;
        }
        std::vector<JobSpec> jobs;
        for (auto& d : out) jobs.push_back({d, pipes});
        return jobs;
    }
};

/// Dry-run plan: one entry per job with its ordered stages.
inline json plan_json(const RunConfig& c) {
    json p = json::array();
    for (std::size_t i = 0; i < c.jobs.size(); ++i) {
        json stages = json::array();
        for (Stage s : plan_stages(c.jobs[i].pipelines)) stages.push_back(stage_name(s));
        p.push_back({{"job", i}, {"descriptor", c.jobs[i].descriptor}, {"stages", stages}});
    }
    return p;
}

} // namespace hsettle
