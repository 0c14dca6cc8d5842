#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "notrade/model.hpp"
#include "notrade/quadrature.hpp"

namespace notrade {

/// Discretized value function v(t, x) on a time x log-odds grid.
///
/// u_values[i][j] = v(times[i], h(z_nodes[j])); the x = 0 and x = 1 curves are
/// kept separately because the state diffusion degenerates there.
struct ValueSurface {
    std::vector<double> times;
    std::vector<double> z_nodes;
    std::vector<std::vector<double>> u_values;
    std::vector<double> v_at_zero;
    std::vector<double> v_at_one;

    /// v(times[i], x) for any x in [0, 1]: cubic interpolation in z inside the
    /// truncated domain, linear in x between the last node and the endpoint.
    double value(std::size_t i, double x) const;
};

/// One time slice of a surface, as consumed by boundary extraction.
struct SliceData {
    std::vector<double> z_nodes;
    std::vector<double> values;
    double v_at_zero = 0.0;
    double v_at_one = 0.0;

    double value(double x) const;
};

struct BoundaryPair {
    double y_lo = 0.0;
    double y_hi = 1.0;
    bool lo_clamped = false;
    bool hi_clamped = false;
};

/// Per-time no-trade interval [y_lo(t), y_hi(t)].
struct NoTradeBoundaries {
    std::vector<double> times;
    std::vector<double> y_lo;
    std::vector<double> y_hi;
    std::vector<bool> lo_clamped;
    std::vector<bool> hi_clamped;

    BoundaryPair slice(std::size_t i) const;

    /// Boundaries at time t: linear interpolation between slices, clamp flags
    /// from the nearest earlier slice.
    BoundaryPair at(double t) const;
};

struct SolverOptions {
    int threads = 0;                 // 0: OpenMP default
    bool reference_kernel = false;   // use the serial reference sweep
    double concavity_tol = 1e-6;     // boundary extraction refuses slices beyond this
};

struct SolveReport {
    ValueSurface surface;
    NoTradeBoundaries boundaries;
    std::vector<int> picard_iterations;  // per time slice
    double final_residual = 0.0;         // max over slices of the last Picard update
    bool converged = true;
};

/// Thrown by extract_boundaries when a slice is not concave within tolerance.
class ConcavityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest second difference of the slice in x over the nodes and the two
/// endpoints; <= 0 for a concave slice. On a uniform x grid this is
/// v[j+1] - 2 v[j] + v[j-1]; in general it is twice the gap between the
/// chord through the neighbours and the middle value.
double max_second_difference(const SliceData& slice);

/// v_x at the z nodes: central differences in z with the chain rule
/// x(1-x) v_x = u_z, second-order one-sided at the truncation edges.
std::vector<double> state_gradient(const SliceData& slice);

/// The maximized nonlocal payoff L(t, x) of a trade opportunity.
double sup_term(const std::function<double(double)>& slice, const BoundaryPair& bounds, double x,
                const ModelParams& params);

/// The no-trade boundaries of one slice, by root-finding on the linearly
/// interpolated gradient. Throws ConcavityError when the slice's largest
/// second difference exceeds concavity_tol.
BoundaryPair extract_boundaries(const SliceData& slice, const ModelParams& params,
                                double concavity_tol = 1e-6);

/// Optimal post-trade fraction: y_lo below, x inside, y_hi above the interval.
double policy_target(double x, const BoundaryPair& bounds);
double policy_target(double t, double x, const NoTradeBoundaries& boundaries);

/// Risky-asset purchase (positive) or sale (negative) that moves wealth w at
/// fraction x to the optimal target, net of proportional costs.
double trade_amount(double wealth, double x, const BoundaryPair& bounds, const ModelParams& params);
double trade_amount(double t, double wealth, double x, const NoTradeBoundaries& boundaries,
                    const ModelParams& params);

/// Applies the fixed-point map once to slice `t_index` of `later`, replacing
/// that slice's values by `prev_slice` (values on the z nodes, then v(t,0),
/// v(t,1) appended). Slices after t_index must be converged. Returns the new
/// slice in the same layout.
std::vector<double> apply_phi_slice(const std::vector<double>& prev_slice,
                                    const ValueSurface& later, std::size_t t_index,
                                    const ModelParams& params, const GridSpec& grid,
                                    const QuadratureRule& rule);

/// Earliest grid time from which y_lo stays clamped at 0 for every slice
/// before T, or nullopt when the slice just before T is not clamped. This is
/// an empirical onset read off the grid, not a bound.
std::optional<double> lower_clamp_onset(const NoTradeBoundaries& boundaries);

/// Backward time-sliced Picard solve of the HJB equation. Non-convergence is
/// reported through `converged` rather than thrown.
SolveReport solve(const ModelParams& params, const GridSpec& grid,
                  const SolverOptions& options = {});

}  // namespace notrade
