#include "notrade/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace notrade::kernels {

std::array<double, 4> cubic_weights(double f) {
    const double fm1 = f - 1.0;
    const double fm2 = f - 2.0;
    const double fp1 = f + 1.0;
    return {-f * fm1 * fm2 / 6.0, fp1 * fm1 * fm2 / 2.0, -fp1 * f * fm2 / 2.0, fp1 * f * fm1 / 6.0};
}

int Stencil::reach() const {
    int r = 0;
    for (int o : offsets) {
        r = std::max(r, std::abs(o));
    }
    return r;
}

Stencil make_stencil(double shift, double scale, const QuadratureRule& rule) {
    std::map<int, double> taps;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const double pos = shift + scale * rule.nodes[q];
        const double base = std::floor(pos);
        const auto w = cubic_weights(pos - base);
        const int b = static_cast<int>(base);
        for (int a = 0; a < 4; ++a) {
            taps[b - 1 + a] += rule.weights[q] * w[a];
        }
    }
    Stencil s;
    s.offsets.reserve(taps.size());
    s.weights.reserve(taps.size());
    for (const auto& [offset, weight] : taps) {
        if (weight != 0.0) {
            s.offsets.push_back(offset);
            s.weights.push_back(weight);
        }
    }
    return s;
}

int required_padding(double shift, double scale, const QuadratureRule& rule) {
    double extent = 0.0;
    for (double g : rule.nodes) {
        extent = std::max(extent, std::abs(shift + scale * g));
    }
    return static_cast<int>(std::ceil(extent)) + 3;
}

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

void sweep_parallel(std::span<const SweepTerm> terms, int pad, std::span<double> out, int threads) {
    const auto n = static_cast<std::ptrdiff_t>(out.size());
    for (const auto& term : terms) {
        if (term.stencil->reach() > pad ||
            term.table.size() != static_cast<std::size_t>(n + 2 * pad)) {
            throw std::invalid_argument("sweep_parallel: table too small for stencil");
        }
    }
    const int n_threads = resolve_threads(threads);
    (void)n_threads;
#pragma omp parallel for schedule(static) num_threads(n_threads)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        double acc = out[j];
        for (const auto& term : terms) {
            const double* row = term.table.data() + pad + j;
            const int* off = term.stencil->offsets.data();
            const double* w = term.stencil->weights.data();
            const std::size_t m = term.stencil->offsets.size();
            double e = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                e += w[k] * row[off[k]];
            }
            acc += term.factor * e;
        }
        out[j] = acc;
    }
}

void sweep_reference(std::span<const SweepTerm> terms, const QuadratureRule& rule, int pad,
                     std::span<double> out) {
    const auto n = static_cast<int>(out.size());
    for (const auto& term : terms) {
        for (int j = 0; j < n; ++j) {
            double e = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double pos = j + pad + term.shift + term.scale * rule.nodes[q];
                const double base = std::floor(pos);
                const auto w = cubic_weights(pos - base);
                const int b = static_cast<int>(base);
                if (b - 1 < 0 || b + 2 >= static_cast<int>(term.table.size())) {
                    throw std::invalid_argument("sweep_reference: table too small");
                }
                double v = 0.0;
                for (int a = 0; a < 4; ++a) {
                    v += w[a] * term.table[b - 1 + a];
                }
                e += rule.weights[q] * v;
            }
            out[j] += term.factor * e;
        }
    }
}

}  // namespace notrade::kernels
