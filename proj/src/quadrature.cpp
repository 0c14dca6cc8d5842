#include "notrade/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace notrade {

QuadratureRule gauss_hermite(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: n must be >= 1");
    }
    // Newton iteration on orthonormal Hermite polynomials (weight e^{-x^2}),
    // then the change of variable x -> sqrt(2) x to the standard normal.
    constexpr double kPiM4 = 0.7511255444649425;  // pi^{-1/4}
    constexpr int kMaxIter = 100;
    std::vector<double> x(n), w(n);
    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        int iter = 0;
        for (; iter < kMaxIter; ++iter) {
            double p1 = kPiM4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        if (iter == kMaxIter) {
            throw std::runtime_error("gauss_hermite: Newton iteration did not converge");
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }

    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        // ascending order
        rule.nodes[i] = -std::numbers::sqrt2 * x[i];
        rule.weights[i] = w[i] / std::sqrt(std::numbers::pi);
        total += rule.weights[i];
    }
    // Remove the O(1e-15) drift so constants integrate to exactly 1.
    for (double& wi : rule.weights) {
        wi /= total;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

namespace {

QuadratureRule compute_gauss_legendre(int n, double a, double b) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-16) {
                break;
            }
        }
        rule.nodes[i] = mid - half * z;
        rule.nodes[n - 1 - i] = mid + half * z;
        rule.weights[i] = 2.0 * half / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

constexpr int kCachedLegendre = 128;

}  // namespace

const QuadratureRule& gauss_legendre_reference(int n) {
    static const std::vector<QuadratureRule> cache = [] {
        std::vector<QuadratureRule> rules(kCachedLegendre + 1);
        for (int k = 1; k <= kCachedLegendre; ++k) {
            rules[k] = compute_gauss_legendre(k, -1.0, 1.0);
        }
        return rules;
    }();
    if (n < 1 || n > kCachedLegendre) {
        throw std::invalid_argument("gauss_legendre_reference: n must be in [1, 128]");
    }
    return cache[n];
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) {
        throw std::invalid_argument("gauss_legendre: n must be >= 1");
    }
    if (n > kCachedLegendre) {
        return compute_gauss_legendre(n, a, b);
    }
    const auto& ref = gauss_legendre_reference(n);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * ref.nodes[i];
        rule.weights[i] = half * ref.weights[i];
    }
    return rule;
}

QuadratureRule graded_gauss_legendre(double a, double b, int points_per_panel, int levels,
                                     double ratio) {
    QuadratureRule rule;
    if (!(b > a)) {
        return rule;
    }
    const double span = b - a;
    auto append = [&](double lo, double hi) {
        const auto panel = gauss_legendre(points_per_panel, lo, hi);
        rule.nodes.insert(rule.nodes.end(), panel.nodes.begin(), panel.nodes.end());
        rule.weights.insert(rule.weights.end(), panel.weights.begin(), panel.weights.end());
    };
    double edge = a + span * std::pow(ratio, levels);
    append(a, edge);
    for (int k = levels - 1; k >= 0; --k) {
        const double next = (k == 0) ? b : a + span * std::pow(ratio, k);
        append(edge, next);
        edge = next;
    }
    return rule;
}

std::vector<double> simpson_weights(int n_intervals, double h) {
    if (n_intervals < 0) {
        throw std::invalid_argument("simpson_weights: negative interval count");
    }
    std::vector<double> w(static_cast<std::size_t>(n_intervals) + 1, 0.0);
    if (n_intervals == 0) {
        return w;
    }
    if (n_intervals == 1) {
        w[0] = w[1] = 0.5 * h;
        return w;
    }
    int simpson_end = n_intervals;
    if (n_intervals % 2 == 1) {
        simpson_end = n_intervals - 3;
        const double c = 3.0 * h / 8.0;
        w[simpson_end] += c;
        w[simpson_end + 1] += 3.0 * c;
        w[simpson_end + 2] += 3.0 * c;
        w[simpson_end + 3] += c;
    }
    for (int k = 0; k + 2 <= simpson_end; k += 2) {
        w[k] += h / 3.0;
        w[k + 1] += 4.0 * h / 3.0;
        w[k + 2] += h / 3.0;
    }
    return w;
}

}  // namespace notrade
