#pragma once

// Experiment records and their CSV/JSON persistence. Numbers are written with
// 17 significant digits so a write/read cycle is exact and two identical runs
// produce identical bytes. A numeric field left at 0 was not computed by any
// requested pipeline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hsettle/core/error.hpp"
#include "hsettle/core/io.hpp"

namespace hsettle {

inline constexpr int kSchemaVersion = 1;

struct ExperimentRecord {
    int schema_version = kSchemaVersion;
    std::string generator;
    std::size_t N = 0;
    double r = 0.0;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double E_freespace = 0.0; // E_1 = |grad v_{N,1}|^2
    double E_torus = 0.0;     // S(r), comparable to N^{-2/3} E_1
    double E_defect = 0.0;    // |grad v_{inf,3}|^2
    double E_vstar = 0.0;     // |grad v_*|^2
    double Vsed_est = 0.0;
    double VSt = 0.0;
    double norm_rho_sigma = 0.0;
    double norm_sigma_n = 0.0;
    double wall_s = 0.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }

    /// Canonical ordering key.
    auto key() const { return std::tie(generator, N, r, lambda, seed); }

    bool operator==(const ExperimentRecord&) const = default;

    void validate() const {
        for (double v : numbers()) {
            if (!std::isfinite(v)) throw PreconditionError("record field not finite");
        }
    }

    std::vector<double> numbers() const {
        return {r,     lambda,         E_freespace,  E_torus, E_defect, E_vstar, Vsed_est,
                VSt,   norm_rho_sigma, norm_sigma_n, wall_s};
    }
};

inline const char* kRecordHeader =
    "schema_version,generator,N,r,lambda,seed,E_freespace,E_torus,E_defect,E_vstar,Vsed_est,VSt,norm_rho_sigma,"
    "norm_sigma_n,wall_s,status";

/// Status text safe for an unquoted CSV cell.
inline std::string csv_safe(std::string s) {
    for (char& ch : s) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ch == ',' ? ';' : ' ';
    }
    return s;
}

inline void sort_records(std::vector<ExperimentRecord>& rs) {
    std::stable_sort(rs.begin(), rs.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
}

inline void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& rs) {
    os << kRecordHeader << "\n";
    for (const auto& x : rs) {
        os << x.schema_version << ',' << x.generator << ',' << x.N << ',' << fmt17(x.r) << ',' << fmt17(x.lambda) << ','
           << x.seed << ',' << fmt17(x.E_freespace) << ',' << fmt17(x.E_torus) << ',' << fmt17(x.E_defect) << ','
           << fmt17(x.E_vstar) << ',' << fmt17(x.Vsed_est) << ',' << fmt17(x.VSt) << ',' << fmt17(x.norm_rho_sigma)
           << ',' << fmt17(x.norm_sigma_n) << ',' << fmt17(x.wall_s) << ',' << csv_safe(x.status) << "\n";
    }
}

inline std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kRecordHeader) throw ConfigError("records.csv", "header mismatch");
    std::vector<ExperimentRecord> out;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 16) throw ConfigError("records.csv:" + std::to_string(lineno), "expected 16 columns");
        auto num = [&](std::size_t i) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cells[i], &used);
                if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
                return v;
            } catch (const std::exception&) {
                throw ConfigError("records.csv:" + std::to_string(lineno), "bad number '" + cells[i] + "'");
            }
        };
        ExperimentRecord x;
        x.schema_version = static_cast<int>(num(0));
        x.generator = cells[1];
        x.N = static_cast<std::size_t>(std::stoull(cells[2]));
        x.r = num(3);
        x.lambda = num(4);
        x.seed = std::stoull(cells[5]);
        x.E_freespace = num(6);
        x.E_torus = num(7);
        x.E_defect = num(8);
        x.E_vstar = num(9);
        x.Vsed_est = num(10);
        x.VSt = num(11);
        x.norm_rho_sigma = num(12);
        x.norm_sigma_n = num(13);
        x.wall_s = num(14);
        x.status = cells[15];
        out.push_back(x);
    }
    return out;
}

inline json record_to_json(const ExperimentRecord& x) {
    return {{"schema_version", x.schema_version},
            {"generator", x.generator},
            {"N", x.N},
            {"r", x.r},
            {"lambda", x.lambda},
            {"seed", x.seed},
            {"E_freespace", x.E_freespace},
            {"E_torus", x.E_torus},
            {"E_defect", x.E_defect},
            {"E_vstar", x.E_vstar},
            {"Vsed_est", x.Vsed_est},
            {"VSt", x.VSt},
            {"norm_rho_sigma", x.norm_rho_sigma},
            {"norm_sigma_n", x.norm_sigma_n},
            {"wall_s", x.wall_s},
            {"status", x.status}};
}

inline ExperimentRecord record_from_json(const json& j) {
    ExperimentRecord x;
    x.schema_version = j.at("schema_version").get<int>();
    x.generator = j.at("generator").get<std::string>();
    x.N = j.at("N").get<std::size_t>();
    x.r = j.at("r").get<double>();
    x.lambda = j.at("lambda").get<double>();
    x.seed = j.at("seed").get<std::uint64_t>();
    x.E_freespace = j.at("E_freespace").get<double>();
    x.E_torus = j.at("E_torus").get<double>();
    x.E_defect = j.at("E_defect").get<double>();
    x.E_vstar = j.at("E_vstar").get<double>();
    x.Vsed_est = j.at("Vsed_est").get<double>();
    x.VSt = j.at("VSt").get<double>();
    x.norm_rho_sigma = j.at("norm_rho_sigma").get<double>();
    x.norm_sigma_n = j.at("norm_sigma_n").get<double>();
    x.wall_s = j.at("wall_s").get<double>();
    x.status = j.at("status").get<std::string>();
    return x;
}

} // namespace hsettle
