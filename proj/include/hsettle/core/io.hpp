#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsettle/core/generators.hpp"

namespace hsettle {

using json = nlohmann::json;

/// 17 significant digits, so doubles round-trip exactly.
inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json domain_to_json(const Domain& d) {
    json ext = json::array();
    for (int k = 0; k < 3; ++k) {
        if (!d.bounded(k)) break;
        ext.push_back({d.extents[k].lo, d.extents[k].hi});
    }
    return {{"kind", d.kind_name()}, {"extents", ext}};
}

inline Domain domain_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("domain", "expected an object");
    const std::string kind = j.value("kind", "box");
    if (!j.contains("extents") || !j["extents"].is_array()) throw ConfigError("domain.extents", "missing");
    const auto& e = j["extents"];
    auto iv = [&](std::size_t k) {
        if (k >= e.size() || !e[k].is_array() || e[k].size() != 2) throw ConfigError("domain.extents", "need [lo, hi] pairs");
        return Interval{e[k][0].get<double>(), e[k][1].get<double>()};
    };
    try {
        if (kind == "box") {
            if (e.size() != 3) throw ConfigError("domain.extents", "box needs three intervals");
            return Domain::box(iv(0), iv(1), iv(2));
        }
        if (kind == "duct") {
            if (e.size() != 2) throw ConfigError("domain.extents", "duct needs two intervals");
            return Domain::duct(iv(0), iv(1));
        }
    } catch (const PreconditionError& ex) {
        throw ConfigError("domain", ex.what());
    }
    throw ConfigError("domain.kind", "unknown kind '" + kind + "'");
}

/// One row per particle: index, center, cube half-width (0 without cubes).
inline void write_configuration_csv(std::ostream& os, const ParticleConfiguration& c) {
    os << "index,x1,x2,x3,h\n";
    for (std::size_t i = 0; i < c.N(); ++i) {
        const auto& x = c.centers[i];
        os << i << ',' << fmt17(x[0]) << ',' << fmt17(x[1]) << ',' << fmt17(x[2]) << ','
           << fmt17(c.has_cubes() ? c.cubes[i].half_width : 0.0) << '\n';
    }
}

inline json configuration_sidecar(const ParticleConfiguration& c) {
    return {{"generator", c.generator}, {"N", c.N()},          {"r", c.r},
            {"R", c.radius()},          {"separation_c", c.separation_c},
            {"domain", domain_to_json(c.domain)}};
}

/// Inverse of write_configuration_csv + configuration_sidecar.
inline ParticleConfiguration read_configuration(std::istream& csv, const json& sidecar) {
    ParticleConfiguration c;
    c.generator = sidecar.value("generator", "custom");
    c.r = sidecar.at("r").get<double>();
    c.separation_c = sidecar.value("separation_c", 0.0);
    c.domain = domain_from_json(sidecar.at("domain"));
    std::string line;
    std::getline(csv, line);
    if (line != "index,x1,x2,x3,h") throw ConfigError("csv", "unexpected header '" + line + "'");
    bool cubes = true;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) v.push_back(std::strtod(cell.c_str(), nullptr));
        if (v.size() != 5) throw ConfigError("csv", "expected 5 columns");
        Vec3 x{v[1], v[2], v[3]};
        c.centers.push_back(x);
        c.cubes.push_back({x, v[4]});
        cubes = cubes && v[4] > 0.0;
    }
    if (!cubes) c.cubes.clear();
    return c;
}

/// A configuration plus its limit density, as produced from a JSON descriptor
/// {generator, M|N, r, lambda?, seed?, domain?}.
struct GeneratedSystem {
    ParticleConfiguration config;
    DensityField density;
};

inline GeneratedSystem generate_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("<root>", "expected an object");
    if (!j.contains("generator")) throw ConfigError("generator", "missing");
    const std::string g = j["generator"].get<std::string>();
    if (!j.contains("r")) throw ConfigError("r", "missing");
    const double r = j["r"].get<double>();
    auto need_M = [&]() {
        if (!j.contains("M") || !j["M"].is_number_integer()) throw ConfigError("M", "missing integer");
        return j["M"].get<int>();
    };
    if (g == "lattice") {
        const Domain d = j.contains("domain") ? domain_from_json(j["domain"]) : Domain::unit_cube();
        GeneratedSystem s{generate_cubic_lattice(need_M(), r, d), {}};
        const AxisBox unit = detail::bounding_unit_cube(d);
        s.density = DensityField::uniform(unit, d);
        return s;
    }
    if (g == "shifted") {
        if (!j.contains("lambda")) throw ConfigError("lambda", "missing");
        auto [c, n] = generate_shifted_example(need_M(), j["lambda"].get<double>(), r);
        return {c, n};
    }
    if (g == "half_duct") {
        auto [c, n] = generate_half_duct_lattice(need_M(), r);
        return {c, n};
    }
    if (g == "hardcore_poisson") {
        if (!j.contains("N")) throw ConfigError("N", "missing");
        const Domain d = j.contains("domain") ? domain_from_json(j["domain"]) : Domain::unit_cube();
        GeneratedSystem s{generate_hardcore_poisson(j["N"].get<std::size_t>(), r, d, j.value("seed", 0ULL)), {}};
        AxisBox all{{d.extents[0], d.extents[1], d.extents[2]}};
        s.density = DensityField::uniform(all, d);
        return s;
    }
    throw ConfigError("generator", "unknown generator '" + g + "'");
}

} // namespace hsettle
