#include "notrade/frictionless.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "notrade/fraction_law.hpp"

namespace notrade::frictionless {

namespace {

constexpr int kMaxSplitPoints = 128;

void require_interior(double x, const char* what) {
    if (!(x > 0.0 && x < 1.0)) {
        throw DomainError(std::string(what) + ": state must lie in (0,1), got " + std::to_string(x));
    }
}

/// int_t^T e^{-lambda(s-t)} f(s) ds on the graded rule.
template <class F>
double discounted_time_integral(const ModelParams& p, double t, F&& f) {
    if (t >= p.horizon) {
        return 0.0;
    }
    const auto rule = graded_gauss_legendre(t, p.horizon);
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double s = rule.nodes[k];
        acc += rule.weights[k] * std::exp(-p.lambda * (s - t)) * f(s);
    }
    return acc;
}

/// E[f(A)] over the growth factor A = exp(drift tau + sigma sqrt(tau) G).
template <class F>
double expect_growth(const ModelParams& p, double tau, const QuadratureRule& rule, F&& f) {
    const double drift = p.log_odds_drift() * tau;
    const double sd = p.sigma * std::sqrt(tau);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        acc += rule.weights[q] * f(std::exp(drift + sd * rule.nodes[q]));
    }
    return acc;
}

int split_points(const QuadratureRule& rule) {
    return std::clamp(static_cast<int>(rule.size()), 2, kMaxSplitPoints);
}

}  // namespace

double AsymptoticReport::y0_at(double t) const {
    return linear_curve(times, y0)(t);
}

Curve linear_curve(std::vector<double> times, std::vector<double> values) {
    return [times = std::move(times), values = std::move(values)](double t) {
        if (t <= times.front()) return values.front();
        if (t >= times.back()) return values.back();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
        const double f = (t - times[k]) / (times[k + 1] - times[k]);
        return (1.0 - f) * values[k] + f * values[k + 1];
    };
}

double vx0(const ModelParams& p, double t, double x, const QuadratureRule& rule) {
    require_interior(x, "vx0");
    const double excess = p.mu - p.r;
    const double s2 = p.sigma * p.sigma;
    return discounted_time_integral(p, t, [&](double s) {
        return expect_growth(p, s - t, rule, [&](double a) {
            const double den = a * x + 1.0 - x;
            const double y = a * x / den;
            // Y(1-Y)/(x(1-x)) = A / den^2
            return a / (den * den) * (excess - s2 * y);
        });
    });
}

double vxx0(const ModelParams& p, double t, double x, const QuadratureRule& rule) {
    require_interior(x, "vxx0");
    if (t >= p.horizon) {
        return 0.0;
    }
    // (Y - x) / (x(1-x)) = (A - 1) / den
    auto sq = [&](double a) {
        const double q = (a - 1.0) / (a * x + 1.0 - x);
        return q * q;
    };
    const double terminal =
        std::exp(-p.lambda * (p.horizon - t)) * expect_growth(p, p.horizon - t, rule, sq);
    if (p.lambda == 0.0) {
        return -terminal;
    }
    const double running =
        discounted_time_integral(p, t, [&](double s) { return expect_growth(p, s - t, rule, sq); });
    return -terminal - p.lambda * running;
}

double y0(const ModelParams& p, double t, const QuadratureRule& rule) {
    const double merton = p.merton_fraction();
    if (!(merton > 0.0 && merton < 1.0)) {
        throw DomainError("zero-cost optimum needs a Merton fraction in (0,1), got " +
                          std::to_string(merton));
    }
    if (t >= p.horizon) {
        return merton;
    }
    double lo = 1e-9;
    double hi = 1.0 - 1e-9;
    if (!(vx0(p, t, lo, rule) > 0.0 && vx0(p, t, hi, rule) < 0.0)) {
        throw DomainError("vx0 root not bracketed in (0,1) at t = " + std::to_string(t));
    }
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (vx0(p, t, mid, rule) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double f_coeff(const ModelParams& p, double t, double x, const Curve& y0_curve,
               const QuadratureRule& rule) {
    require_interior(x, "f_coeff");
    if (p.lambda == 0.0 || t >= p.horizon) {
        return 0.0;
    }
    const int points = split_points(rule);
    const double drift = p.log_odds_drift();
    auto inner = [&](double s) {
        const double tau = s - t;
        if (!(tau > 0.0)) {
            // Graded nodes can round onto t; there Y = x.
            const double d = y0_curve(s) - x;
            return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        }
        const double sd = p.sigma * std::sqrt(tau);
        auto sens = [&](double g) {
            const double a = std::exp(drift * tau + sd * g);
            const double den = a * x + 1.0 - x;
            return a / (den * den);
        };
        const double split = fraction_law::crossing_quantile(p, t, x, s, y0_curve(s));
        return fraction_law::expect_split_normal(
            sens, [&](double g) { return -sens(g); }, split, points);
    };
    return p.lambda * discounted_time_integral(p, t, inner);
}

double g_coeff(const ModelParams& p, double t, const Curve& y0_curve, const QuadratureRule& rule) {
    if (p.lambda == 0.0 || t >= p.horizon) {
        return 0.0;
    }
    const int points = split_points(rule);
    const double x = y0_curve(t);
    require_interior(x, "g_coeff");
    auto inner = [&](double s) {
        const double target = y0_curve(s);
        if (!(s > t)) {
            return std::abs(x - target);
        }
        auto gap = [&](double g) { return fraction_law::flow(p, t, x, s, g) - target; };
        const double split = fraction_law::crossing_quantile(p, t, x, s, target);
        return fraction_law::expect_split_normal(
            [&](double g) { return -gap(g); }, gap, split, points);
    };
    return p.lambda * discounted_time_integral(p, t, inner);
}

AsymptoticReport asymptotic_report(const ModelParams& params, const GridSpec& spec,
                                   const QuadratureRule& rule) {
    const ModelParams p = validate(params);
    const Grid grid = make_grid(validate(spec), p);
    const auto n = static_cast<std::ptrdiff_t>(grid.times.size());

    AsymptoticReport rep;
    rep.times = grid.times;
    rep.y0.assign(n, 0.0);
    rep.vxx0.assign(n, 0.0);
    rep.f_at_y0.assign(n, 0.0);
    rep.g.assign(n, 0.0);
    rep.slope_lo.assign(n, -std::numeric_limits<double>::infinity());
    rep.slope_hi.assign(n, std::numeric_limits<double>::infinity());
    rep.value_slope.assign(n, 0.0);

    // Exceptions may not leave an OpenMP region; collect and rethrow.
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            rep.y0[i] = y0(p, grid.times[i], rule);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw DomainError(e);
    }

    const Curve curve = linear_curve(rep.times, rep.y0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n - 1; ++i) {
        const double t = grid.times[i];
        const double y = rep.y0[i];
        rep.vxx0[i] = vxx0(p, t, y, rule);
        rep.f_at_y0[i] = f_coeff(p, t, y, curve, rule);
        rep.g[i] = g_coeff(p, t, curve, rule);
        rep.slope_lo[i] = -(rep.f_at_y0[i] - 1.0) / rep.vxx0[i];
        rep.slope_hi[i] = -(rep.f_at_y0[i] + 1.0) / rep.vxx0[i];
    }

    // int_t^T G by composite Simpson on the remaining grid.
    const double dt = grid.dt();
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double tail = 0.0;
        if (i < n - 1) {
            const auto w = simpson_weights(static_cast<int>(n - 1 - i), dt);
            for (std::size_t k = 0; k < w.size(); ++k) {
                tail += w[k] * rep.g[i + k];
            }
        }
        rep.value_slope[i] = rep.g[i] + p.lambda * tail;
    }
    return rep;
}

double value_slope_at_x(const ModelParams& p, double t, double x, const AsymptoticReport& report,
                        const QuadratureRule& rule) {
    const double base = linear_curve(report.times, report.value_slope)(t);
    const double y = report.y0_at(t);
    if (x == y) {
        return base;
    }
    const Curve curve = linear_curve(report.times, report.y0);
    const auto gl = gauss_legendre(24, std::min(x, y), std::max(x, y));
    double integral = 0.0;
    for (std::size_t k = 0; k < gl.size(); ++k) {
        integral += gl.weights[k] * f_coeff(p, t, gl.nodes[k], curve, rule);
    }
    return base - (x > y ? integral : -integral);
}

}  // namespace notrade::frictionless
