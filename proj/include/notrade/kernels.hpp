#pragma once

#include <array>
#include <span>
#include <vector>

#include "notrade/quadrature.hpp"

// Data-parallel building blocks of the value-function solver.
//
// Values are tabulated on a uniform grid padded by `pad` cells on each side;
// a Gaussian expectation E[F(z_j + shift + scale * G)] then becomes a fixed
// stencil applied at every node j. The parallel sweep merges the quadrature
// nodes into one stencil and splits the nodes across OpenMP threads; the
// reference sweep interpolates node by node on a single thread and is kept
// for testing and benchmarking.
namespace notrade::kernels {

/// Cubic Lagrange weights for points at offsets -1, 0, 1, 2 and fractional
/// position f in [0, 1).
std::array<double, 4> cubic_weights(double f);

/// Gaussian expectation as grid offsets (in cells) and weights.
struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;

    int reach() const;  // max |offset|
};

/// Merges the rule's nodes, each interpolated cubically, into one stencil.
/// `shift` and `scale` are measured in grid cells.
Stencil make_stencil(double shift, double scale, const QuadratureRule& rule);

/// Number of padding cells needed for expectations with the given shift and
/// scale (both in cells).
int required_padding(double shift, double scale, const QuadratureRule& rule);

/// One term of a sweep: factor * E[table(. + shift + scale G)].
struct SweepTerm {
    const Stencil* stencil = nullptr;
    std::span<const double> table;  // size n + 2 * pad
    double factor = 0.0;
    double shift = 0.0;  // only read by the reference sweep
    double scale = 0.0;  // only read by the reference sweep
};

/// out[j] += sum_terms factor * (stencil . table)[j + pad], j in [0, out.size()).
/// Each node is reduced by one thread in term order, so results are bitwise
/// identical for any thread count. threads <= 0 means the OpenMP default.
void sweep_parallel(std::span<const SweepTerm> terms, int pad, std::span<double> out,
                    int threads = 0);

/// Serial reference for sweep_parallel: interpolates every quadrature node
/// individually. Agrees with the parallel sweep to rounding.
void sweep_reference(std::span<const SweepTerm> terms, const QuadratureRule& rule, int pad,
                     std::span<double> out);

/// Threads OpenMP would use for threads <= 0 (1 without OpenMP).
int resolve_threads(int threads);

}  // namespace notrade::kernels
