#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "notrade/kernels.hpp"

using namespace notrade;
using namespace notrade::kernels;

namespace {

struct Fixture {
    int n = 301;
    int pad = 0;
    QuadratureRule rule = gauss_hermite(32);
    std::vector<Stencil> stencils;
    std::vector<std::vector<double>> tables;
    std::vector<SweepTerm> terms;

    explicit Fixture(int n_terms) {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<std::pair<double, double>> shapes;
        for (int k = 0; k < n_terms; ++k) {
            const double shift = 3.0 * u(rng);
            const double scale = 1.0 + 6.0 * (k + 1) / n_terms;
            shapes.emplace_back(shift, scale);
            pad = std::max(pad, required_padding(shift, scale, rule));
        }
        stencils.reserve(n_terms);
        for (int k = 0; k < n_terms; ++k) {
            stencils.push_back(make_stencil(shapes[k].first, shapes[k].second, rule));
            std::vector<double> table(n + 2 * pad);
            for (std::size_t i = 0; i < table.size(); ++i) {
                table[i] = std::sin(0.05 * i * (k + 1)) + u(rng) * 1e-3;
            }
            tables.push_back(std::move(table));
        }
        for (int k = 0; k < n_terms; ++k) {
            terms.push_back({&stencils[k], tables[k], 0.5 + 0.1 * k, shapes[k].first, shapes[k].second});
        }
    }
};

}  // namespace

TEST_CASE("cubic weights interpolate cubics exactly") {
    for (double f : {0.0, 0.25, 0.5, 0.9}) {
        const auto w = cubic_weights(f);
        CHECK(w[0] + w[1] + w[2] + w[3] == doctest::Approx(1.0).epsilon(1e-15));
        auto poly = [](double x) { return 2.0 - x + 0.5 * x * x - 0.3 * x * x * x; };
        const double v = w[0] * poly(-1) + w[1] * poly(0) + w[2] * poly(1) + w[3] * poly(2);
        CHECK(v == doctest::Approx(poly(f)).epsilon(1e-14));
    }
    const auto w0 = cubic_weights(0.0);
    CHECK(w0[1] == 1.0);
    CHECK(w0[0] == 0.0);
}

TEST_CASE("stencil weights sum to one and reach fits the padding") {
    const auto rule = gauss_hermite(64);
    for (double scale : {0.3, 2.0, 40.0}) {
        for (double shift : {-5.5, 0.0, 7.25}) {
            const auto s = make_stencil(shift, scale, rule);
            double sum = 0.0;
            for (double w : s.weights) sum += w;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(s.reach() <= required_padding(shift, scale, rule));
        }
    }
}

TEST_CASE("stencil reproduces a Gaussian expectation of a quadratic") {
    // E[(j + shift + scale G)^2] = (j + shift)^2 + scale^2 on an index-valued table.
    const auto rule = gauss_hermite(16);
    const double shift = 1.3;
    const double scale = 2.7;
    const auto s = make_stencil(shift, scale, rule);
    const int pad = required_padding(shift, scale, rule);
    const int n = 20;
    std::vector<double> table(n + 2 * pad);
    for (int i = 0; i < static_cast<int>(table.size()); ++i) {
        const double x = i - pad;
        table[i] = x * x;
    }
    std::vector<double> out(n, 0.0);
    std::vector<SweepTerm> terms{{&s, table, 1.0, shift, scale}};
    sweep_parallel(terms, pad, out, 1);
    for (int j = 0; j < n; ++j) {
        CHECK(out[j] == doctest::Approx((j + shift) * (j + shift) + scale * scale).epsilon(1e-12));
    }
}

TEST_CASE("parallel sweep agrees with the serial reference") {
    Fixture fx(12);
    std::vector<double> a(fx.n, 0.25);
    std::vector<double> b(fx.n, 0.25);
    sweep_parallel(fx.terms, fx.pad, a);
    sweep_reference(fx.terms, fx.rule, fx.pad, b);
    for (int j = 0; j < fx.n; ++j) {
        CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
    }
}

TEST_CASE("parallel sweep is bitwise identical for any thread count") {
    Fixture fx(8);
    std::vector<double> one(fx.n, 0.0);
    sweep_parallel(fx.terms, fx.pad, one, 1);
    for (int threads : {2, 3, 4, 7}) {
        std::vector<double> many(fx.n, 0.0);
        sweep_parallel(fx.terms, fx.pad, many, threads);
        CHECK(std::memcmp(one.data(), many.data(), one.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("sweep rejects tables narrower than the stencil") {
    Fixture fx(2);
    std::vector<double> out(fx.n, 0.0);
    CHECK_THROWS_AS(sweep_parallel(fx.terms, fx.pad - 5, out), std::invalid_argument);
}

TEST_CASE("resolve_threads honours explicit counts") {
    CHECK(resolve_threads(0) >= 1);
#ifdef _OPENMP
    CHECK(resolve_threads(3) == 3);
#endif
}
