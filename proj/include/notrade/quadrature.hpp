#pragma once

#include <vector>

namespace notrade {

/// Nodes and weights for a one-dimensional quadrature rule.
///
/// Rules built by `gauss_hermite` integrate functions of a standard normal
/// variable: E[f(G)] ~ sum_k weights[k] * f(nodes[k]), weights summing to 1.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule rescaled to the standard normal density. Exact for
/// polynomials of degree up to 2n-1.
QuadratureRule gauss_hermite(int n);

/// Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

/// Cached Gauss-Legendre rule on [-1, 1], n in [1, 128].
const QuadratureRule& gauss_legendre_reference(int n);

/// Composite Gauss-Legendre rule on [a, b] whose panels shrink geometrically
/// toward `a`: panel edges at a + (b-a)*ratio^k, k = 0..levels, plus a last
/// panel [a, a + (b-a)*ratio^levels]. Suited to integrands that behave like
/// sqrt(s - a) or decay like exp(-lambda (s - a)).
QuadratureRule graded_gauss_legendre(double a, double b, int points_per_panel = 12,
                                     int levels = 14, double ratio = 0.25);

/// Weights of the composite Simpson rule on `n_intervals` equal intervals of
/// width h. An odd interval count closes with Simpson's 3/8 rule on the last
/// three intervals; a single interval falls back to the trapezoid rule.
std::vector<double> simpson_weights(int n_intervals, double h);

}  // namespace notrade
