#include "notrade/fraction_law.hpp"

#include <algorithm>
#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <numbers>

namespace notrade::fraction_law {

namespace {

constexpr double kNormalCutoff = 12.0;

double normal_pdf(double g) { return std::exp(-0.5 * g * g) / std::sqrt(2.0 * std::numbers::pi); }

void require_interior(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) {
        throw DomainError(std::string(what) + " must lie strictly inside (0, 1)");
    }
}

}  // namespace

double growth_factor(const ModelParams& p, double t, double s, double g) {
    const double tau = s - t;
    return std::exp(p.log_odds_drift() * tau + p.sigma * std::sqrt(tau) * g);
}

double flow(const ModelParams& p, double t, double x, double s, double g) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (s <= t) return x;
    // Work on the log-odds scale so extreme draws neither overflow nor lose
    // the (1 - Y) digits.
    const double tau = s - t;
    return logistic(logit(x) + p.log_odds_drift() * tau + p.sigma * std::sqrt(tau) * g);
}

double flow_sensitivity(const ModelParams& p, double t, double x, double s, double g) {
    require_interior(x, "x");
    if (s <= t) return 1.0;
    const double tau = s - t;
    const double z = logit(x) + p.log_odds_drift() * tau + p.sigma * std::sqrt(tau) * g;
    const double y = logistic(z);
    const double y_c = logistic_complement(z);
    return (y * y_c) / (x * (1.0 - x));
}

double density(const ModelParams& p, double s, double y, double t, double x) {
    if (!(s > t)) {
        throw DomainError("density requires s > t");
    }
    require_interior(x, "x");
    require_interior(y, "y");
    const double tau = s - t;
    const double centered = -p.log_odds_drift() * tau + std::log(y * (1.0 - x) / ((1.0 - y) * x));
    return std::exp(-centered * centered / (2.0 * p.sigma * p.sigma * tau)) /
           (p.sigma * y * (1.0 - y) * std::sqrt(2.0 * std::numbers::pi * tau));
}

double crossing_quantile(const ModelParams& p, double t, double x, double s, double threshold) {
    require_interior(x, "x");
    require_interior(threshold, "threshold");
    if (!(s > t)) {
        throw DomainError("crossing_quantile requires s > t");
    }
    const double tau = s - t;
    return (logit(threshold) - logit(x) - p.log_odds_drift() * tau) / (p.sigma * std::sqrt(tau));
}

double expect(const ModelParams& p, double t, double x, double s,
              const std::function<double(double)>& integrand, const QuadratureRule& rule) {
    if (s <= t || x <= 0.0 || x >= 1.0) {
        return integrand(std::clamp(x, 0.0, 1.0));
    }
    const double tau = s - t;
    const double z0 = logit(x) + p.log_odds_drift() * tau;
    const double scale = p.sigma * std::sqrt(tau);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        acc += rule.weights[k] * integrand(logistic(z0 + scale * rule.nodes[k]));
    }
    return acc;
}

double expect_split_normal(const std::function<double(double)>& below,
                           const std::function<double(double)>& above, double split, int points) {
    const double cut = std::clamp(split, -kNormalCutoff, kNormalCutoff);
    const auto& ref = gauss_legendre_reference(points);
    auto piece = [&ref](const std::function<double(double)>& f, double a, double b) {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t k = 0; k < ref.size(); ++k) {
            const double g = mid + half * ref.nodes[k];
            acc += ref.weights[k] * normal_pdf(g) * f(g);
        }
        return half * acc;
    };
    double acc = 0.0;
    if (cut > -kNormalCutoff) {
        acc += piece(below, -kNormalCutoff, cut);
    }
    if (cut < kNormalCutoff) {
        acc += piece(above, cut, kNormalCutoff);
    }
    return acc;
}

double normal_quantile(double prob) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * prob);
}

}  // namespace notrade::fraction_law
