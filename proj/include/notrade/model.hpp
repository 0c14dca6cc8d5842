#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace notrade {

/// Raised when a parameter set or grid spec violates its constraints.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised for evaluations outside an operation's domain (e.g. x at 0 or 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Market and friction constants.
///
/// Trading succeeds only at arrivals of a Poisson clock with intensity
/// `lambda`; a successful buy pays `cost_buy` per unit bought and a sell
/// loses `cost_sell` per unit sold.
struct ModelParams {
    double mu = 0.4;
    double r = 0.1;
    double sigma = 1.0;
    double lambda = 3.0;
    double horizon = 1.0;
    double cost_buy = 0.05;
    double cost_sell = 0.05;

    /// (mu - r) / sigma^2, the optimal constant weight of the frictionless,
    /// continuously traded problem.
    double merton_fraction() const { return (mu - r) / (sigma * sigma); }

    /// Drift of the log-odds of the uncontrolled risky fraction.
    double log_odds_drift() const { return mu - r - 0.5 * sigma * sigma; }

    bool frictionless() const { return cost_buy == 0.0 && cost_sell == 0.0; }
};

/// Discretization of the (time, log-odds) domain and solver tolerances.
struct GridSpec {
    double z_min = -8.0;
    double z_max = 8.0;
    int n_state = 401;
    int n_time = 200;
    int n_quad = 64;
    double picard_tol = 1e-12;
    int picard_max_iter = 200;
};

struct Grid {
    std::vector<double> times;
    std::vector<double> z_nodes;

    double dt() const { return times[1] - times[0]; }
    double dz() const { return z_nodes[1] - z_nodes[0]; }
};

/// Returns `params` unchanged, or throws ValidationError naming the violated
/// constraint.
ModelParams validate(const ModelParams& params);
GridSpec validate(const GridSpec& spec);

/// Uniform time grid on [0, horizon] and uniform z grid on [z_min, z_max].
Grid make_grid(const GridSpec& spec, const ModelParams& params);

/// h(z) = e^z / (1 + e^z), evaluated without overflow.
inline double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// 1 - h(z) = h(-z), without cancellation.
inline double logistic_complement(double z) { return logistic(-z); }

/// h^{-1}(x) = ln(x / (1 - x)).
inline double logit(double x) { return std::log(x) - std::log1p(-x); }

std::string describe(const ModelParams& params);

}  // namespace notrade
