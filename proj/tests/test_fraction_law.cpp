#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "notrade/fraction_law.hpp"

using namespace notrade;
using namespace notrade::fraction_law;

namespace {

const ModelParams kBase{};

// Normal draw that makes the growth factor exactly one.
double unit_growth_draw(const ModelParams& p, double tau) {
    return -p.log_odds_drift() * tau / (p.sigma * std::sqrt(tau));
}

}  // namespace

TEST_CASE("flow fixed points") {
    for (double g : {-3.0, 0.0, 2.5}) {
        CHECK(flow(kBase, 0.2, 0.37, 0.2, g) == 0.37);
        CHECK(flow(kBase, 0.0, 0.0, 0.8, g) == 0.0);
        CHECK(flow(kBase, 0.0, 1.0, 0.8, g) == 1.0);
    }
    const double tau = 0.3;
    CHECK(flow(kBase, 0.1, 0.42, 0.1 + tau, unit_growth_draw(kBase, tau)) ==
          doctest::Approx(0.42).epsilon(1e-14));
    CHECK(growth_factor(kBase, 0.1, 0.1 + tau, unit_growth_draw(kBase, tau)) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("flow matches the growth-factor form") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(0.01, 0.99);
    std::normal_distribution<double> ng;
    for (int k = 0; k < 500; ++k) {
        const double x = ux(rng);
        const double g = ng(rng);
        const double a = growth_factor(kBase, 0.0, 0.6, g);
        CHECK(flow(kBase, 0.0, x, 0.6, g) == doctest::Approx(a * x / (a * x + 1.0 - x)).epsilon(1e-13));
    }
}

TEST_CASE("flow sensitivity examples and domain") {
    CHECK(flow_sensitivity(kBase, 0.3, 0.2, 0.3, 1.7) == 1.0);
    const double tau = 0.5;
    CHECK(flow_sensitivity(kBase, 0.0, 0.5, tau, unit_growth_draw(kBase, tau)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(flow_sensitivity(kBase, 0.0, 0.0, 0.5, 0.0), DomainError);
    CHECK_THROWS_AS(flow_sensitivity(kBase, 0.0, 1.0, 0.5, 0.0), DomainError);
}

TEST_CASE("flow sensitivity lies within the growth bounds") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(1e-4, 1.0 - 1e-4);
    std::uniform_real_distribution<double> ut(1e-6, 1.0);
    std::normal_distribution<double> ng(0.0, 2.0);
    const double c = std::abs(kBase.r - kBase.mu + 0.5 * kBase.sigma * kBase.sigma);
    for (int k = 0; k < 2000; ++k) {
        const double x = ux(rng);
        const double tau = ut(rng);
        const double g = ng(rng);
        const double d = flow_sensitivity(kBase, 0.0, x, tau, g);
        const double e = c * tau + kBase.sigma * std::sqrt(tau) * std::abs(g);
        CHECK(d > 0.0);
        CHECK(d >= std::exp(-e) * (1.0 - 1e-12));
        CHECK(d <= std::exp(e) * (1.0 + 1e-12));
    }
}

TEST_CASE("flow is increasing in x") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0.001, 0.999);
    std::normal_distribution<double> ng;
    for (int k = 0; k < 2000; ++k) {
        double a = ux(rng);
        double b = ux(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const double g = ng(rng);
        CHECK(flow(kBase, 0.0, a, 0.4, g) < flow(kBase, 0.0, b, 0.4, g));
    }
}

TEST_CASE("flow sensitivity equals the central difference of flow") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(0.01, 0.99);
    std::uniform_real_distribution<double> ut(0.01, 1.0);
    std::normal_distribution<double> ng;
    const double h = 1e-5;
    for (int k = 0; k < 1000; ++k) {
        const double x = ux(rng);
        const double tau = ut(rng);
        const double g = ng(rng);
        const double fd = (flow(kBase, 0.0, x + h, tau, g) - flow(kBase, 0.0, x - h, tau, g)) / (2.0 * h);
        const double exact = flow_sensitivity(kBase, 0.0, x, tau, g);
        CHECK(std::abs(fd - exact) <= 1e-6 * exact);
    }
}

TEST_CASE("relative displacement lies between 1 - 1/A and A - 1") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ux(0.01, 0.99);
    std::normal_distribution<double> ng;
    for (int k = 0; k < 2000; ++k) {
        const double x = ux(rng);
        const double g = ng(rng);
        const double a = growth_factor(kBase, 0.0, 0.7, g);
        if (std::abs(a - 1.0) < 1e-9) continue;
        const double q = (flow(kBase, 0.0, x, 0.7, g) - x) / (x * (1.0 - x));
        CHECK(q > std::min(1.0 - 1.0 / a, a - 1.0));
        CHECK(q < std::max(1.0 - 1.0 / a, a - 1.0));
        // For A > 1 the ordering is 1 - 1/A < q < A - 1.
        if (a > 1.0) {
            CHECK(q > 1.0 - 1.0 / a);
            CHECK(q < a - 1.0);
        }
    }
}

TEST_CASE("density integrates to one") {
    // Oracle: trapezoid rule in log-odds, y = h(u), dy = y(1-y) du.
    for (double x : {0.05, 0.3, 0.5, 0.9}) {
        for (double tau : {0.01, 0.25, 1.0}) {
            const double center = logit(x) + kBase.log_odds_drift() * tau;
            const double width = 14.0 * kBase.sigma * std::sqrt(tau);
            const int n = 20000;
            const double du = 2.0 * width / n;
            double acc = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double u = center - width + k * du;
                const double y = logistic(u);
                if (y <= 0.0 || y >= 1.0) continue;
                const double w = (k == 0 || k == n) ? 0.5 : 1.0;
                acc += w * density(kBase, tau, y, 0.0, x) * y * logistic(-u) * du;
            }
            CHECK(std::abs(acc - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("density median moves with the drift") {
    // Median of Y via the normal quantile at 1/2 of the underlying Gaussian,
    // checked against the density's own cumulative mass.
    const double x = 0.4;
    const double tau = 0.5;
    ModelParams up = kBase;
    up.mu = 0.9;  // mu - r - sigma^2/2 = 0.3 > 0
    REQUIRE(up.log_odds_drift() > 0.0);
    const double median = logistic(logit(x) + up.log_odds_drift() * tau + up.sigma * std::sqrt(tau) * normal_quantile(0.5));
    CHECK(median > x);
    // Mass below the median is one half.
    const int n = 40000;
    const double lo = logit(x) - 14.0 * std::sqrt(tau);
    const double du = (logit(median) - lo) / n;
    double mass = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double u = lo + k * du;
        const double y = logistic(u);
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        mass += w * density(up, tau, y, 0.0, x) * y * logistic(-u) * du;
    }
    CHECK(mass == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("density is symmetric without drift at one half") {
    ModelParams p = kBase;
    p.mu = p.r + 0.5 * p.sigma * p.sigma;
    for (double y : {0.01, 0.2, 0.45}) {
        CHECK(density(p, 0.6, y, 0.0, 0.5) == doctest::Approx(density(p, 0.6, 1.0 - y, 0.0, 0.5)).epsilon(1e-12));
    }
}

TEST_CASE("density domain errors") {
    CHECK_THROWS_AS(density(kBase, 0.5, 0.3, 0.5, 0.3), DomainError);
    CHECK_THROWS_AS(density(kBase, 0.2, 0.3, 0.5, 0.3), DomainError);
    CHECK_THROWS_AS(density(kBase, 0.8, 0.0, 0.5, 0.3), DomainError);
    CHECK_THROWS_AS(density(kBase, 0.8, 0.3, 0.5, 1.0), DomainError);
}

TEST_CASE("expect basics") {
    const auto rule = gauss_hermite(64);
    CHECK(expect(kBase, 0.0, 0.3, 0.7, [](double) { return 1.0; }, rule) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expect(kBase, 0.0, 0.0, 0.7, [](double y) { return y; }, rule) == 0.0);
    CHECK(expect(kBase, 0.0, 1.0, 0.7, [](double y) { return y; }, rule) == 1.0);
    CHECK(expect(kBase, 0.4, 0.3, 0.4, [](double y) { return y * y; }, rule) == 0.09);
}

TEST_CASE("expected fraction matches Monte Carlo") {
    const auto rule = gauss_hermite(64);
    const double x = 0.5;
    const double tau = 0.25;
    const double quad = expect(kBase, 0.0, x, tau, [](double y) { return y; }, rule);

    std::mt19937_64 rng(20240501);
    std::normal_distribution<double> ng;
    const int n = 10'000'000;
    double sum = 0.0;
    double sum2 = 0.0;
    const double z0 = std::log(x / (1.0 - x)) + kBase.log_odds_drift() * tau;
    const double sd = kBase.sigma * std::sqrt(tau);
    for (int k = 0; k < n; ++k) {
        const double y = 1.0 / (1.0 + std::exp(-(z0 + sd * ng(rng))));
        sum += y;
        sum2 += y * y;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
    CHECK(std::abs(quad - mean) <= 3.0 * se);
}

TEST_CASE("mean absolute displacement has the square-root short-time limit") {
    const double tau = 1e-6;
    for (double x : {0.1, 0.3, 0.5, 0.8}) {
        const double split = crossing_quantile(kBase, 0.0, x, tau, x);
        auto gap = [&](double g) { return flow(kBase, 0.0, x, tau, g) - x; };
        const double mad = expect_split_normal([&](double g) { return -gap(g); }, gap, split, 64);
        const double limit = kBase.sigma * std::sqrt(2.0 / std::numbers::pi) * x * (1.0 - x);
        CHECK(mad / std::sqrt(tau) == doctest::Approx(limit).epsilon(0.01));
    }
}

TEST_CASE("crossing quantile inverts the flow") {
    for (double th : {0.05, 0.3, 0.77}) {
        const double g = crossing_quantile(kBase, 0.1, 0.4, 0.6, th);
        CHECK(flow(kBase, 0.1, 0.4, 0.6, g) == doctest::Approx(th).epsilon(1e-13));
    }
    CHECK_THROWS_AS(crossing_quantile(kBase, 0.1, 0.4, 0.1, 0.5), DomainError);
}

TEST_CASE("split normal expectation and quantile") {
    auto absg = [](double g) { return std::abs(g); };
    CHECK(expect_split_normal(absg, absg, 0.0) == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-12));
    // P(G < 1) = Phi(1)
    const double phi1 = 0.5 * std::erfc(-1.0 / std::numbers::sqrt2);
    CHECK(expect_split_normal([](double) { return 1.0; }, [](double) { return 0.0; }, 1.0) ==
          doctest::Approx(phi1).epsilon(1e-12));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
}
