#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "notrade/hjb_solver.hpp"
#include "notrade/model.hpp"

// Exact Monte Carlo of the controlled wealth process. Between Poisson trading
// times the bond and stock holdings grow by closed-form factors, so the only
// error is sampling error.
namespace notrade::sim {

/// Target fraction chosen at a trading time, given (time, pre-trade fraction).
using Policy = std::function<double(double, double)>;

struct SimConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    double x0 = 0.3;
    double w0 = 1.0;
    bool record_trades = false;
    int threads = 0;  // 0: OpenMP default
};

struct TradeRecord {
    std::int64_t path = 0;
    double time = 0.0;
    double x_pre = 0.0;
    double x_post = 0.0;
    double cost = 0.0;
};

struct SimResult {
    double mean_log_wealth = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    double mean_trade_count = 0.0;
    std::optional<std::vector<TradeRecord>> trade_log;  // ordered by path, then time
};

/// Simulates ln W_T. Each path draws from its own stream keyed by
/// (seed, path index), so the result does not depend on the thread count and
/// policies see common random numbers. Throws std::invalid_argument for a bad
/// config or a policy target outside [0,1], and std::runtime_error when a
/// trade would leave nonpositive wealth.
SimResult simulate(const ModelParams& params, const Policy& policy, const SimConfig& config);

struct NamedPolicy {
    std::string name;
    Policy policy;
};

struct NamedResult {
    std::string name;
    SimResult result;
};

/// Runs every policy on the same random numbers.
std::vector<NamedResult> compare(const ModelParams& params, const std::vector<NamedPolicy>& policies,
                                 const SimConfig& config);

/// Standard error of the difference of two results, sqrt(se_a^2 + se_b^2).
double pooled_std_error(const SimResult& a, const SimResult& b);

/// Trade to the no-trade interval, boundaries interpolated in t.
Policy optimal_policy(NoTradeBoundaries boundaries);

/// Never trade.
Policy never_trade();

/// Always jump to a fixed fraction, whatever the cost.
Policy constant_target(double target);

}  // namespace notrade::sim
