#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "notrade/model.hpp"

namespace notrade {

/// Raised for unreadable or malformed configuration files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a `key = value` config file can carry.
///
/// The model and grid keys are mu, r, sigma, lambda, horizon, cost_buy,
/// cost_sell, z_min, z_max, n_state, n_time, n_quad, picard_tol,
/// picard_max_iter. Simulation and sweep commands additionally read the
/// optional keys x0, w0 and sweep_time.
struct RunConfig {
    ModelParams params;
    GridSpec grid;
    std::optional<double> x0;
    std::optional<double> w0;
    std::optional<double> sweep_time;
};

/// Parses config text. Blank lines and `#` comments are ignored; unknown keys,
/// duplicate keys and unparsable values are errors. Missing keys keep their
/// defaults. The result is validated.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::filesystem::path& path);

/// Serializes back to the same format (17 significant digits).
std::string to_config_text(const RunConfig& config);

}  // namespace notrade
