#pragma once

#include <functional>

#include "notrade/model.hpp"
#include "notrade/quadrature.hpp"

// Law of the uncontrolled risky fraction Y_s^{(t,x)}: between trades the
// log-odds ln(Y/(1-Y)) is a Brownian motion with drift mu - r - sigma^2/2 and
// volatility sigma, so Y is an explicit function of one standard normal draw.
namespace notrade::fraction_law {

/// Growth factor A = exp((mu - r - sigma^2/2)(s - t) + sigma sqrt(s - t) g).
double growth_factor(const ModelParams& p, double t, double s, double g);

/// Y_s^{(t,x)} with B_s - B_t replaced by g sqrt(s - t). Endpoints 0 and 1 are
/// absorbing.
double flow(const ModelParams& p, double t, double x, double s, double g);

/// dY/dx = Y(1-Y) / (x(1-x)). Throws DomainError for x outside (0,1).
double flow_sensitivity(const ModelParams& p, double t, double x, double s, double g);

/// Density of Y_s^{(t,x)} at y. Requires s > t and x, y in (0,1).
double density(const ModelParams& p, double s, double y, double t, double x);

/// Standard normal quantile g at which Y_s^{(t,x)} equals `threshold`, for x
/// and threshold in (0,1) and s > t. Y is increasing in g.
double crossing_quantile(const ModelParams& p, double t, double x, double s, double threshold);

/// E[integrand(Y_s^{(t,x)})] by the Gauss-Hermite rule; integrand(x) when s == t.
double expect(const ModelParams& p, double t, double x, double s,
              const std::function<double(double)>& integrand, const QuadratureRule& rule);

/// Expectation of a function of the normal driver that is smooth on each side
/// of `split`: E[f(G)] = int_{-inf}^{split} f n + int_{split}^{inf} f n, each
/// piece by Gauss-Legendre on the normal density truncated at +-12.
double expect_split_normal(const std::function<double(double)>& below,
                           const std::function<double(double)>& above, double split,
                           int points = 48);

/// Standard normal quantile function.
double normal_quantile(double p);

}  // namespace notrade::fraction_law
