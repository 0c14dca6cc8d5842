#include "notrade/hjb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "notrade/kernels.hpp"

namespace notrade {

namespace {

double running_payoff(const ModelParams& p, double y) {
    return (p.mu - p.r) * y + p.r - 0.5 * p.sigma * p.sigma * y * y;
}

/// Evaluates a slice given as node values on a uniform z grid plus endpoints.
double interpolate_slice(std::span<const double> z_nodes, std::span<const double> values,
                         double v0, double v1, double x) {
    if (x <= 0.0) return v0;
    if (x >= 1.0) return v1;
    const auto n = static_cast<int>(z_nodes.size());
    const double z = logit(x);
    if (z <= z_nodes.front()) {
        const double x0 = logistic(z_nodes.front());
        return v0 + (values.front() - v0) * (x / x0);
    }
    if (z >= z_nodes.back()) {
        const double c0 = logistic_complement(z_nodes.back());
        return v1 + (values.back() - v1) * ((1.0 - x) / c0);
    }
    const double dz = (z_nodes.back() - z_nodes.front()) / (n - 1);
    const double pos = (z - z_nodes.front()) / dz;
    if (n < 4) {
        const int b = std::min(static_cast<int>(pos), n - 2);
        const double f = pos - b;
        return (1.0 - f) * values[b] + f * values[b + 1];
    }
    const int base = std::clamp(static_cast<int>(std::floor(pos)), 1, n - 3);
    const auto w = kernels::cubic_weights(pos - base);
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        acc += w[a] * values[base - 1 + a];
    }
    return acc;
}

double golden_section_max(const std::function<double(double)>& f, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return std::max({f(0.5 * (a + b)), f(0.0), f(1.0)});
}

/// Three-branch form of L given the slice values at the boundaries.
double sup_term_branches(double x, const BoundaryPair& b, double v_lo, double v_hi, double v_x,
                         const ModelParams& p) {
    if (x < b.y_lo) {
        return v_lo - std::log((1.0 + p.cost_buy * b.y_lo) / (1.0 + p.cost_buy * x));
    }
    if (x > b.y_hi) {
        return v_hi - std::log((1.0 - p.cost_sell * b.y_hi) / (1.0 - p.cost_sell * x));
    }
    return v_x;
}

/// Finds the first root of a decreasing function given at nodes x[j] with
/// values g[j] (g[first] > 0 >= g[last] is checked by the caller), refined by
/// bisection on `g_of`.
double first_root(std::span<const double> xs, std::span<const double> gs,
                  const std::function<double(std::size_t, double)>& g_of) {
    std::size_t j = 0;
    while (j + 1 < gs.size() && gs[j + 1] > 0.0) {
        ++j;
    }
    if (gs[j + 1] == 0.0) {
        return xs[j + 1];
    }
    double lo = xs[j];
    double hi = xs[j + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g_of(j, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------

double ValueSurface::value(std::size_t i, double x) const {
    return interpolate_slice(z_nodes, u_values.at(i), v_at_zero.at(i), v_at_one.at(i), x);
}

double SliceData::value(double x) const {
    return interpolate_slice(z_nodes, values, v_at_zero, v_at_one, x);
}

BoundaryPair NoTradeBoundaries::slice(std::size_t i) const {
    return {y_lo.at(i), y_hi.at(i), lo_clamped.at(i), hi_clamped.at(i)};
}

BoundaryPair NoTradeBoundaries::at(double t) const {
    if (times.empty()) {
        throw std::logic_error("NoTradeBoundaries::at on empty boundaries");
    }
    if (t <= times.front()) return slice(0);
    if (t >= times.back()) return slice(times.size() - 1);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    const double f = (t - times[k]) / (times[k + 1] - times[k]);
    BoundaryPair b;
    b.y_lo = (1.0 - f) * y_lo[k] + f * y_lo[k + 1];
    b.y_hi = (1.0 - f) * y_hi[k] + f * y_hi[k + 1];
    b.lo_clamped = lo_clamped[k];
    b.hi_clamped = hi_clamped[k];
    return b;
}

double max_second_difference(const SliceData& s) {
    const std::size_t n = s.values.size();
    std::vector<double> xs;
    std::vector<double> vs;
    xs.reserve(n + 2);
    vs.reserve(n + 2);
    xs.push_back(0.0);
    vs.push_back(s.v_at_zero);
    for (std::size_t j = 0; j < n; ++j) {
        xs.push_back(logistic(s.z_nodes[j]));
        vs.push_back(s.values[j]);
    }
    xs.push_back(1.0);
    vs.push_back(s.v_at_one);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j + 1 < xs.size(); ++j) {
        const double hl = xs[j] - xs[j - 1];
        const double hr = xs[j + 1] - xs[j];
        const double chord = (hr * vs[j - 1] + hl * vs[j + 1]) / (hl + hr);
        worst = std::max(worst, 2.0 * (chord - vs[j]));
    }
    return worst;
}

std::vector<double> state_gradient(const SliceData& s) {
    const std::size_t n = s.values.size();
    const double dz = (s.z_nodes.back() - s.z_nodes.front()) / static_cast<double>(n - 1);
    const auto& u = s.values;
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        double uz;
        if (j == 0) {
            uz = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dz);
        } else if (j == n - 1) {
            uz = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dz);
        } else {
            uz = (u[j + 1] - u[j - 1]) / (2.0 * dz);
        }
        const double z = s.z_nodes[j];
        d[j] = uz / (logistic(z) * logistic_complement(z));
    }
    return d;
}

double sup_term(const std::function<double(double)>& slice, const BoundaryPair& bounds, double x,
                const ModelParams& params) {
    if (params.frictionless()) {
        return golden_section_max(slice, 0.0, 1.0);
    }
    const double v_lo = x < bounds.y_lo ? slice(bounds.y_lo) : 0.0;
    const double v_hi = x > bounds.y_hi ? slice(bounds.y_hi) : 0.0;
    const bool inside = x >= bounds.y_lo && x <= bounds.y_hi;
    return sup_term_branches(x, bounds, v_lo, v_hi, inside ? slice(x) : 0.0, params);
}

BoundaryPair extract_boundaries(const SliceData& slice, const ModelParams& params,
                                double concavity_tol) {
    const double worst = max_second_difference(slice);
    if (worst > concavity_tol) {
        throw ConcavityError("value slice is not concave: second difference " +
                             std::to_string(worst));
    }
    const double beta = params.cost_buy;
    const double eps = params.cost_sell;
    const auto d = state_gradient(slice);
    const std::size_t n = d.size();
    std::vector<double> xs(n);
    for (std::size_t j = 0; j < n; ++j) {
        xs[j] = logistic(slice.z_nodes[j]);
    }
    auto grad_at = [&](std::size_t j, double y) {
        const double f = (y - xs[j]) / (xs[j + 1] - xs[j]);
        return (1.0 - f) * d[j] + f * d[j + 1];
    };

    BoundaryPair b;
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j) {
        g[j] = d[j] * (1.0 + beta * xs[j]) - beta;
    }
    if (g.front() <= 0.0) {
        b.y_lo = 0.0;
        b.lo_clamped = true;
    } else if (g.back() > 0.0) {
        b.y_lo = 1.0;
        b.lo_clamped = true;
    } else {
        b.y_lo = first_root(xs, g, [&](std::size_t j, double y) {
            return grad_at(j, y) * (1.0 + beta * y) - beta;
        });
    }

    for (std::size_t j = 0; j < n; ++j) {
        g[j] = d[j] * (1.0 - eps * xs[j]) + eps;
    }
    if (g.front() <= 0.0) {
        b.y_hi = 0.0;
        b.hi_clamped = true;
    } else if (g.back() > 0.0) {
        b.y_hi = 1.0;
        b.hi_clamped = true;
    } else {
        b.y_hi = first_root(xs, g, [&](std::size_t j, double y) {
            return grad_at(j, y) * (1.0 - eps * y) + eps;
        });
    }
    if (b.y_lo > b.y_hi) {
        b.y_lo = b.y_hi;
        b.lo_clamped = b.hi_clamped;
    }
    return b;
}

double policy_target(double x, const BoundaryPair& b) {
    if (x < b.y_lo) return b.y_lo;
    if (x > b.y_hi) return b.y_hi;
    return x;
}

double policy_target(double t, double x, const NoTradeBoundaries& boundaries) {
    return policy_target(x, boundaries.at(t));
}

double trade_amount(double wealth, double x, const BoundaryPair& b, const ModelParams& p) {
    const double target = policy_target(x, b);
    if (target > x) {
        return wealth * (target - x) / (1.0 + p.cost_buy * target);
    }
    if (target < x) {
        return wealth * (target - x) / (1.0 - p.cost_sell * target);
    }
    return 0.0;
}

double trade_amount(double t, double wealth, double x, const NoTradeBoundaries& boundaries,
                    const ModelParams& params) {
    return trade_amount(wealth, x, boundaries.at(t), params);
}

std::optional<double> lower_clamp_onset(const NoTradeBoundaries& b) {
    const std::size_t n = b.times.size();
    if (n < 2) {
        return std::nullopt;
    }
    auto clamped_at_zero = [&b](std::size_t i) { return b.lo_clamped[i] && b.y_lo[i] == 0.0; };
    std::size_t i = n - 1;
    while (i > 0 && clamped_at_zero(i - 1)) {
        --i;
    }
    if (i == n - 1) {
        return std::nullopt;
    }
    return b.times[i];
}

// ---------------------------------------------------------------------------

namespace {

/// Precomputed lag-dependent quantities and the per-slice nonlocal tables.
class Engine {
public:
    Engine(const ModelParams& params, const GridSpec& spec, const SolverOptions& options)
        : p_(validate(params)),
          spec_(validate(spec)),
          options_(options),
          grid_(make_grid(spec, params)),
          rule_(gauss_hermite(spec.n_quad)),
          n_(spec.n_state),
          last_(spec.n_time - 1),
          dz_(grid_.dz()),
          dt_(grid_.dt()) {
        x_.resize(n_);
        payoff_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            x_[j] = logistic(grid_.z_nodes[j]);
            payoff_[j] = running_payoff(p_, x_[j]);
        }
        shift_.assign(last_ + 1, 0.0);
        scale_.assign(last_ + 1, 0.0);
        pad_ = 3;
        for (int m = 1; m <= last_; ++m) {
            const double tau = m * dt_;
            shift_[m] = p_.log_odds_drift() * tau / dz_;
            scale_[m] = p_.sigma * std::sqrt(tau) / dz_;
            pad_ = std::max(pad_, kernels::required_padding(shift_[m], scale_[m], rule_));
        }
        stencils_.resize(last_ + 1);
        expected_payoff_.resize(last_ + 1);
        for (int m = 1; m <= last_; ++m) {
            stencils_[m] = kernels::make_stencil(shift_[m], scale_[m], rule_);
            auto& ef = expected_payoff_[m];
            ef.resize(n_);
            const double tau = m * dt_;
            const double sd = p_.sigma * std::sqrt(tau);
            const double drift = p_.log_odds_drift() * tau;
            for (int j = 0; j < n_; ++j) {
                double acc = 0.0;
                for (std::size_t q = 0; q < rule_.size(); ++q) {
                    acc += rule_.weights[q] *
                           running_payoff(p_, logistic(grid_.z_nodes[j] + drift + sd * rule_.nodes[q]));
                }
                ef[j] = acc;
            }
        }
        tables_.resize(last_ + 1);
        l_zero_.assign(last_ + 1, 0.0);
        l_one_.assign(last_ + 1, 0.0);
    }

    const Grid& grid() const { return grid_; }
    int n() const { return n_; }
    int last() const { return last_; }

    SliceData slice_data(std::span<const double> packed) const {
        SliceData s;
        s.z_nodes = grid_.z_nodes;
        s.values.assign(packed.begin(), packed.begin() + n_);
        s.v_at_zero = packed[n_];
        s.v_at_one = packed[n_ + 1];
        return s;
    }

    BoundaryPair boundaries_of(const SliceData& s) const {
        return extract_boundaries(s, p_, options_.concavity_tol);
    }

    /// Tabulates L(t_k, .) on the padded grid from a converged slice.
    void store_table(int k, const SliceData& s, const BoundaryPair& b) {
        auto& table = tables_[k];
        table.assign(n_ + 2 * pad_, 0.0);
        const double x0 = x_.front();
        const double c_last = logistic_complement(grid_.z_nodes.back());
        if (p_.frictionless()) {
            const double top = sup_term([&s](double y) { return s.value(y); }, b, 0.5, p_);
            std::fill(table.begin(), table.end(), top);
            l_zero_[k] = l_one_[k] = top;
            return;
        }
        const double v_lo = s.value(b.y_lo);
        const double v_hi = s.value(b.y_hi);
        for (int idx = -pad_; idx < n_ + pad_; ++idx) {
            const double z = grid_.z_nodes.front() + idx * dz_;
            const double y = logistic(z);
            double inside;
            if (idx < 0) {
                inside = s.v_at_zero + (s.values.front() - s.v_at_zero) * (y / x0);
            } else if (idx >= n_) {
                inside = s.v_at_one + (s.values.back() - s.v_at_one) * (logistic_complement(z) / c_last);
            } else {
                inside = s.values[idx];
            }
            table[idx + pad_] = sup_term_branches(y, b, v_lo, v_hi, inside, p_);
        }
        l_zero_[k] = sup_term_branches(0.0, b, v_lo, v_hi, s.v_at_zero, p_);
        l_one_[k] = sup_term_branches(1.0, b, v_lo, v_hi, s.v_at_one, p_);
    }

    /// Contributions of slices i+1..last to slice i (packed: nodes, v(t,0), v(t,1)),
    /// plus the Simpson weight of the s = t_i node.
    std::vector<double> later_contribution(int i, double& own_weight) const {
        std::vector<double> out(n_ + 2, 0.0);
        const auto sw = simpson_weights(last_ - i, dt_);
        own_weight = sw[0];
        std::vector<kernels::SweepTerm> terms;
        terms.reserve(last_ - i);
        double b0 = 0.0;
        double b1 = 0.0;
        for (int k = i + 1; k <= last_; ++k) {
            const int m = k - i;
            const double w = sw[m] * std::exp(-p_.lambda * (grid_.times[k] - grid_.times[i]));
            const auto& ef = expected_payoff_[m];
            for (int j = 0; j < n_; ++j) {
                out[j] += w * ef[j];
            }
            b0 += w * (p_.r + p_.lambda * l_zero_[k]);
            b1 += w * (p_.mu - 0.5 * p_.sigma * p_.sigma + p_.lambda * l_one_[k]);
            if (p_.lambda > 0.0) {
                terms.push_back({&stencils_[m], tables_[k], p_.lambda * w, shift_[m], scale_[m]});
            }
        }
        std::span<double> nodes(out.data(), n_);
        if (options_.reference_kernel) {
            kernels::sweep_reference(terms, rule_, pad_, nodes);
        } else {
            kernels::sweep_parallel(terms, pad_, nodes, options_.threads);
        }
        out[n_] = b0;
        out[n_ + 1] = b1;
        return out;
    }

    /// One application of the fixed-point map to slice i.
    std::vector<double> apply(const std::vector<double>& later, double own_weight,
                              const std::vector<double>& current) const {
        const auto s = slice_data(current);
        const auto b = boundaries_of(s);
        std::vector<double> next(n_ + 2);
        const double lam = p_.lambda;
        if (p_.frictionless()) {
            const double top = lam > 0.0 ? sup_term([&s](double y) { return s.value(y); }, b, 0.5, p_) : 0.0;
            for (int j = 0; j < n_; ++j) {
                next[j] = later[j] + own_weight * (payoff_[j] + lam * top);
            }
            next[n_] = later[n_] + own_weight * (p_.r + lam * top);
            next[n_ + 1] = later[n_ + 1] + own_weight * (p_.mu - 0.5 * p_.sigma * p_.sigma + lam * top);
            return next;
        }
        const double v_lo = s.value(b.y_lo);
        const double v_hi = s.value(b.y_hi);
        for (int j = 0; j < n_; ++j) {
            const double l = sup_term_branches(x_[j], b, v_lo, v_hi, s.values[j], p_);
            next[j] = later[j] + own_weight * (payoff_[j] + lam * l);
        }
        const double l0 = sup_term_branches(0.0, b, v_lo, v_hi, s.v_at_zero, p_);
        const double l1 = sup_term_branches(1.0, b, v_lo, v_hi, s.v_at_one, p_);
        next[n_] = later[n_] + own_weight * (p_.r + lam * l0);
        next[n_ + 1] = later[n_ + 1] + own_weight * (p_.mu - 0.5 * p_.sigma * p_.sigma + lam * l1);
        return next;
    }

private:
    ModelParams p_;
    GridSpec spec_;
    SolverOptions options_;
    Grid grid_;
    QuadratureRule rule_;
    int n_;
    int last_;
    double dz_;
    double dt_;
    int pad_ = 0;
    std::vector<double> x_;
    std::vector<double> payoff_;
    std::vector<double> shift_;
    std::vector<double> scale_;
    std::vector<kernels::Stencil> stencils_;
    std::vector<std::vector<double>> expected_payoff_;
    std::vector<std::vector<double>> tables_;
    std::vector<double> l_zero_;
    std::vector<double> l_one_;
};

double sup_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double r = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        r = std::max(r, std::abs(a[k] - b[k]));
    }
    return r;
}

void store_slice(SolveReport& rep, int i, const std::vector<double>& packed, int n,
                 const BoundaryPair& b) {
    rep.surface.u_values[i].assign(packed.begin(), packed.begin() + n);
    rep.surface.v_at_zero[i] = packed[n];
    rep.surface.v_at_one[i] = packed[n + 1];
    rep.boundaries.y_lo[i] = b.y_lo;
    rep.boundaries.y_hi[i] = b.y_hi;
    rep.boundaries.lo_clamped[i] = b.lo_clamped;
    rep.boundaries.hi_clamped[i] = b.hi_clamped;
}

}  // namespace

std::vector<double> apply_phi_slice(const std::vector<double>& prev_slice,
                                    const ValueSurface& later, std::size_t t_index,
                                    const ModelParams& params, const GridSpec& grid,
                                    const QuadratureRule& rule) {
    GridSpec spec = grid;
    spec.n_quad = static_cast<int>(rule.size());
    Engine engine(params, spec, {});
    const int n = engine.n();
    if (prev_slice.size() != static_cast<std::size_t>(n + 2)) {
        throw std::invalid_argument("apply_phi_slice: slice must hold n_state + 2 values");
    }
    const int i = static_cast<int>(t_index);
    if (i >= engine.last()) {
        return std::vector<double>(n + 2, 0.0);
    }
    for (int k = engine.last(); k > i; --k) {
        std::vector<double> packed(later.u_values.at(k));
        packed.push_back(later.v_at_zero.at(k));
        packed.push_back(later.v_at_one.at(k));
        const auto s = engine.slice_data(packed);
        engine.store_table(k, s, engine.boundaries_of(s));
    }
    double own = 0.0;
    const auto contrib = engine.later_contribution(i, own);
    return engine.apply(contrib, own, prev_slice);
}

SolveReport solve(const ModelParams& params, const GridSpec& spec, const SolverOptions& options) {
    Engine engine(params, spec, options);
    const int n = engine.n();
    const int last = engine.last();
    const auto& grid = engine.grid();

    SolveReport rep;
    rep.surface.times = grid.times;
    rep.surface.z_nodes = grid.z_nodes;
    rep.surface.u_values.assign(last + 1, std::vector<double>(n, 0.0));
    rep.surface.v_at_zero.assign(last + 1, 0.0);
    rep.surface.v_at_one.assign(last + 1, 0.0);
    rep.boundaries.times = grid.times;
    rep.boundaries.y_lo.assign(last + 1, 0.0);
    rep.boundaries.y_hi.assign(last + 1, 1.0);
    rep.boundaries.lo_clamped.assign(last + 1, true);
    rep.boundaries.hi_clamped.assign(last + 1, true);
    rep.picard_iterations.assign(last + 1, 0);

    std::vector<double> current(n + 2, 0.0);
    {
        const auto s = engine.slice_data(current);
        const auto b = engine.boundaries_of(s);
        store_slice(rep, last, current, n, b);
        engine.store_table(last, s, b);
    }

    for (int i = last - 1; i >= 0; --i) {
        double own = 0.0;
        const auto later = engine.later_contribution(i, own);
        double residual = std::numeric_limits<double>::infinity();
        int iter = 0;
        while (iter < spec.picard_max_iter) {
            auto next = engine.apply(later, own, current);
            residual = sup_norm_diff(next, current);
            current = std::move(next);
            ++iter;
            if (residual <= spec.picard_tol) {
                break;
            }
        }
        rep.picard_iterations[i] = iter;
        rep.final_residual = std::max(rep.final_residual, residual);
        const auto s = engine.slice_data(current);
        const auto b = engine.boundaries_of(s);
        store_slice(rep, i, current, n, b);
        if (residual > spec.picard_tol) {
            rep.converged = false;
            return rep;
        }
        engine.store_table(i, s, b);
    }
    return rep;
}

}  // namespace notrade
