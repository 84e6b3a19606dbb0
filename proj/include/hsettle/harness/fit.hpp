#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hsettle/core/error.hpp"

namespace hsettle {

/// value ~ exp(log_prefactor) * x^exponent; residual is the RMS log-space misfit.
struct PowerLawFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double residual = 0.0;
    std::size_t samples = 0;

    nlohmann::json to_json() const {
        return {{"exponent", exponent}, {"log_prefactor", log_prefactor}, {"residual", residual}, {"samples", samples}};
    }
};

inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& samples) {
    if (samples.size() < 2) throw PreconditionError("power-law fit needs at least 2 samples");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : samples) {
        if (!(x > 0.0) || !(y > 0.0)) throw PreconditionError("power-law fit needs positive samples");
        mx += std::log(x);
        my += std::log(y);
    }
    const double n = static_cast<double>(samples.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : samples) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (!(sxx > 0.0)) throw PreconditionError("power-law fit needs distinct abscissae");
    PowerLawFit f;
    f.samples = samples.size();
    f.exponent = sxy / sxx;
    f.log_prefactor = my - f.exponent * mx;
    double ss = 0.0;
    for (const auto& [x, y] : samples) {
        const double e = std::log(y) - (f.log_prefactor + f.exponent * std::log(x));
        ss += e * e;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

} // namespace hsettle
