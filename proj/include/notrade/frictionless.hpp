#pragma once

#include <functional>
#include <vector>

#include "notrade/model.hpp"
#include "notrade/quadrature.hpp"

// Zero-cost reference quantities and first-order small-cost coefficients,
// computed by quadrature against the fraction law alone. Nothing here reads a
// solved value surface, so these serve as an independent check of the solver.
namespace notrade::frictionless {

/// First-order expansion data on a time grid. At t = T the coefficients
/// vanish and the boundary slopes are reported as -inf / +inf.
struct AsymptoticReport {
    std::vector<double> times;
    std::vector<double> y0;           // zero-cost optimal fraction
    std::vector<double> vxx0;         // v0_xx(t, y0(t))
    std::vector<double> f_at_y0;      // F(t, y0(t))
    std::vector<double> g;            // G(t)
    std::vector<double> slope_lo;     // -(F - 1) / vxx0
    std::vector<double> slope_hi;     // -(F + 1) / vxx0
    std::vector<double> value_slope;  // G(t) + lambda int_t^T G

    /// Linear interpolation of y0 in t.
    double y0_at(double t) const;
};

using Curve = std::function<double(double)>;

/// Piecewise-linear interpolant through (times[k], values[k]), constant
/// beyond the ends.
Curve linear_curve(std::vector<double> times, std::vector<double> values);

/// v0_x(t, x). Throws DomainError for x outside (0,1).
double vx0(const ModelParams& p, double t, double x, const QuadratureRule& rule);

/// v0_xx(t, x); strictly negative for t < T. Throws DomainError for x outside (0,1).
double vxx0(const ModelParams& p, double t, double x, const QuadratureRule& rule);

/// Root of vx0(t, .) by bisection to 1e-10. At t >= T returns the Merton
/// fraction. Throws DomainError when the Merton fraction is outside (0,1) or
/// the root is not bracketed.
double y0(const ModelParams& p, double t, const QuadratureRule& rule);

/// F(t, x) = lambda int_t^T e^{-lambda(s-t)} E[dY/dx sgn(y0(s) - Y_s)] ds.
/// The normal driver is split where Y_s crosses y0(s); each side uses
/// Gauss-Legendre with rule.size() points.
double f_coeff(const ModelParams& p, double t, double x, const Curve& y0_curve,
               const QuadratureRule& rule);

/// G(t) = lambda int_t^T e^{-lambda(s-t)} E|Y_s^{(t, y0(t))} - y0(s)| ds.
double g_coeff(const ModelParams& p, double t, const Curve& y0_curve, const QuadratureRule& rule);

/// Tabulates every field on the time grid of `grid`.
AsymptoticReport asymptotic_report(const ModelParams& p, const GridSpec& grid,
                                   const QuadratureRule& rule);

/// First-order value slope at state x: value_slope(t) - int_{y0(t)}^x F(t, eta) d eta.
/// value_slope and y0 are interpolated linearly in t from the report.
double value_slope_at_x(const ModelParams& p, double t, double x, const AsymptoticReport& report,
                        const QuadratureRule& rule);

}  // namespace notrade::frictionless
