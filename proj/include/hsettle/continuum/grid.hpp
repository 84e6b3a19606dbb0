#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsettle/core/error.hpp"

namespace hsettle {

/// Grid fields plus the scalar diagnostics of a solve.
struct GridSolution {
    double h = 0.0;
    std::vector<std::string> names;           // one per field
    std::vector<std::vector<int>> shapes;     // per field, slowest axis first
    std::vector<std::vector<double>> origins; // coordinates of entry 0 of each field
    std::vector<std::vector<double>> fields;
    double residual = 0.0;   // relative residual at exit
    int iterations = 0;      // 0 for direct solves
    double energy = 0.0;     // discrete Dirichlet energy
    double pairing = 0.0;    // <f, u>
    double max_divergence = 0.0;

    std::size_t field_index(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return i;
        }
        throw PreconditionError("no grid field named " + name);
    }
};

/// Writes one field as raw little-endian doubles to `path` and a JSON header to `path`.json.
inline void export_grid_field(const GridSolution& s, const std::string& name, const std::string& path) {
    const std::size_t i = s.field_index(name);
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw Error("cannot open " + path);
    bin.write(reinterpret_cast<const char*>(s.fields[i].data()),
              static_cast<std::streamsize>(s.fields[i].size() * sizeof(double)));
    nlohmann::json header{{"shape", s.shapes[i]}, {"spacing", s.h}, {"origin", s.origins[i]}, {"component", name},
                          {"dtype", "float64"}};
    std::ofstream js(path + ".json");
    js << header.dump(2) << "\n";
}

} // namespace hsettle
