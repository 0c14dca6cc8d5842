#include "notrade/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace notrade::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double log_add(double a, double b) {
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    if (lo == -std::numeric_limits<double>::infinity()) {
        return hi;
    }
    return hi + std::log1p(std::exp(lo - hi));
}

double safe_log(double v) {
    return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
}

/// Fixed-order pairwise sum.
double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct PathOutcome {
    double log_wealth = 0.0;
    int trades = 0;
};

PathOutcome run_path(const ModelParams& p, const Policy& policy, const SimConfig& cfg,
                     std::int64_t path, std::vector<TradeRecord>* log) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(path))));
    std::exponential_distribution<double> wait(p.lambda > 0.0 ? p.lambda : 1.0);
    std::normal_distribution<double> normal;

    const double log_w0 = std::log(cfg.w0);
    double log_bond = log_w0 + safe_log(1.0 - cfg.x0);
    double log_stock = log_w0 + safe_log(cfg.x0);
    const double stock_drift = p.mu - 0.5 * p.sigma * p.sigma;

    auto evolve = [&](double dt) {
        const double g = normal(rng);
        log_bond += p.r * dt;
        log_stock += stock_drift * dt + p.sigma * std::sqrt(dt) * g;
    };

    PathOutcome out;
    double t = 0.0;
    while (true) {
        const double next =
            p.lambda > 0.0 ? t + wait(rng) : std::numeric_limits<double>::infinity();
        if (next >= p.horizon) {
            evolve(p.horizon - t);
            break;
        }
        evolve(next - t);
        t = next;

        const double log_w = log_add(log_bond, log_stock);
        const double w = std::exp(log_w);
        const double x = std::exp(log_stock - log_w);
        const double y = policy(t, x);
        if (!(y >= 0.0 && y <= 1.0)) {
            throw std::invalid_argument("policy target outside [0,1]: " + std::to_string(y));
        }
        if (y == x) {
            continue;
        }
        // Purchase (m > 0) or sale (m < 0) that lands exactly on y after costs.
        const double m = y > x ? w * (y - x) / (1.0 + p.cost_buy * y)
                               : w * (y - x) / (1.0 - p.cost_sell * y);
        const double cost = m > 0.0 ? p.cost_buy * m : -p.cost_sell * m;
        const double w_post = w - cost;
        if (!(w_post > 0.0)) {
            throw std::runtime_error("trade leaves nonpositive wealth on path " +
                                     std::to_string(path));
        }
        const double log_post = std::log(w_post);
        log_bond = log_post + safe_log(1.0 - y);
        log_stock = log_post + safe_log(y);
        ++out.trades;
        if (log != nullptr) {
            log->push_back({path, t, x, std::exp(log_stock - log_add(log_bond, log_stock)), cost});
        }
    }
    out.log_wealth = log_add(log_bond, log_stock);
    return out;
}

void check_config(const SimConfig& cfg) {
    if (cfg.n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
    if (!(cfg.w0 > 0.0)) throw std::invalid_argument("w0 must be positive");
    if (!(cfg.x0 >= 0.0 && cfg.x0 <= 1.0)) throw std::invalid_argument("x0 must lie in [0,1]");
}

}  // namespace

SimResult simulate(const ModelParams& params, const Policy& policy, const SimConfig& cfg) {
    const ModelParams p = validate(params);
    check_config(cfg);
    const std::int64_t n = cfg.n_paths;
    std::vector<double> values(n);
    std::vector<double> counts(n);
    std::vector<std::vector<TradeRecord>> logs(cfg.record_trades ? n : 0);

    std::exception_ptr failure;
    std::mutex failure_mutex;
#ifdef _OPENMP
    const int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#endif
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t k = 0; k < n; ++k) {
        try {
            const auto o = run_path(p, policy, cfg, k, cfg.record_trades ? &logs[k] : nullptr);
            values[k] = o.log_wealth;
            counts[k] = o.trades;
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    // Deviations from the first path keep identical samples at exactly zero spread.
    const double anchor = values[0];
    std::vector<double> dev(n);
    for (std::int64_t k = 0; k < n; ++k) dev[k] = values[k] - anchor;
    const double mean_dev = pairwise_sum(dev) / static_cast<double>(n);
    for (std::int64_t k = 0; k < n; ++k) {
        const double d = dev[k] - mean_dev;
        dev[k] = d * d;
    }

    SimResult res;
    res.n_paths = n;
    res.mean_log_wealth = anchor + mean_dev;
    res.std_error =
        n > 1 ? std::sqrt(pairwise_sum(dev) / static_cast<double>(n - 1) / static_cast<double>(n))
              : 0.0;
    res.mean_trade_count = pairwise_sum(counts) / static_cast<double>(n);
    if (cfg.record_trades) {
        std::vector<TradeRecord> all;
        for (auto& l : logs) all.insert(all.end(), l.begin(), l.end());
        res.trade_log = std::move(all);
    }
    return res;
}

std::vector<NamedResult> compare(const ModelParams& params, const std::vector<NamedPolicy>& policies,
                                 const SimConfig& config) {
    std::vector<NamedResult> out;
    out.reserve(policies.size());
    for (const auto& np : policies) {
        out.push_back({np.name, simulate(params, np.policy, config)});
    }
    return out;
}

double pooled_std_error(const SimResult& a, const SimResult& b) {
    return std::hypot(a.std_error, b.std_error);
}

Policy optimal_policy(NoTradeBoundaries boundaries) {
    return [b = std::move(boundaries)](double t, double x) { return policy_target(t, x, b); };
}

Policy never_trade() {
    return [](double, double x) { return x; };
}

Policy constant_target(double target) {
    if (!(target >= 0.0 && target <= 1.0)) {
        throw std::invalid_argument("constant target must lie in [0,1]");
    }
    return [target](double, double) { return target; };
}

}  // namespace notrade::sim
