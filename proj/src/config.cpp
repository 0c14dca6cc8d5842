#include "notrade/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace notrade {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != value.size() || value.empty()) {
        throw ConfigError("invalid real value for '" + key + "': '" + value + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    int out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("invalid integer value for '" + key + "': '" + value + "'");
    }
    return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    auto real = [](double& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = parse_real(k, v); };
    };
    auto integer = [](int& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = parse_int(k, v); };
    };
    auto optional_real = [](std::optional<double>& field) -> Setter {
        return [&field](const std::string& k, const std::string& v) { field = parse_real(k, v); };
    };
    const std::map<std::string, Setter> setters = {
        {"mu", real(cfg.params.mu)},
        {"r", real(cfg.params.r)},
        {"sigma", real(cfg.params.sigma)},
        {"lambda", real(cfg.params.lambda)},
        {"horizon", real(cfg.params.horizon)},
        {"cost_buy", real(cfg.params.cost_buy)},
        {"cost_sell", real(cfg.params.cost_sell)},
        {"z_min", real(cfg.grid.z_min)},
        {"z_max", real(cfg.grid.z_max)},
        {"n_state", integer(cfg.grid.n_state)},
        {"n_time", integer(cfg.grid.n_time)},
        {"n_quad", integer(cfg.grid.n_quad)},
        {"picard_tol", real(cfg.grid.picard_tol)},
        {"picard_max_iter", integer(cfg.grid.picard_max_iter)},
        {"x0", optional_real(cfg.x0)},
        {"w0", optional_real(cfg.w0)},
        {"sweep_time", optional_real(cfg.sweep_time)},
    };

    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        it->second(key, value);
    }

    try {
        validate(cfg.params);
        validate(cfg.grid);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    if (cfg.x0 && !(*cfg.x0 >= 0.0 && *cfg.x0 <= 1.0)) {
        throw ConfigError("x0 must lie in [0, 1]");
    }
    if (cfg.w0 && !(*cfg.w0 > 0.0)) {
        throw ConfigError("w0 must be positive");
    }
    if (cfg.sweep_time && !(*cfg.sweep_time >= 0.0 && *cfg.sweep_time < cfg.params.horizon)) {
        throw ConfigError("sweep_time must lie in [0, horizon)");
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_config_text(const RunConfig& c) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "mu = " << c.params.mu << '\n'
       << "r = " << c.params.r << '\n'
       << "sigma = " << c.params.sigma << '\n'
       << "lambda = " << c.params.lambda << '\n'
       << "horizon = " << c.params.horizon << '\n'
       << "cost_buy = " << c.params.cost_buy << '\n'
       << "cost_sell = " << c.params.cost_sell << '\n'
       << "z_min = " << c.grid.z_min << '\n'
       << "z_max = " << c.grid.z_max << '\n'
       << "n_state = " << c.grid.n_state << '\n'
       << "n_time = " << c.grid.n_time << '\n'
       << "n_quad = " << c.grid.n_quad << '\n'
       << "picard_tol = " << c.grid.picard_tol << '\n'
       << "picard_max_iter = " << c.grid.picard_max_iter << '\n';
    if (c.x0) os << "x0 = " << *c.x0 << '\n';
    if (c.w0) os << "w0 = " << *c.w0 << '\n';
    if (c.sweep_time) os << "sweep_time = " << *c.sweep_time << '\n';
    return os.str();
}

}  // namespace notrade
