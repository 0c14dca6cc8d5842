// Times the serial reference sweep against the OpenMP sweep, alone and inside
// a full solve, and checks that they agree.
//
//   bench_kernels [--repeats N] [--threads N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "notrade/hjb_solver.hpp"
#include "notrade/kernels.hpp"
#include "notrade/quadrature.hpp"

using namespace notrade;

namespace {

template <class F>
double best_of(int repeats, F&& body) {
    double best = 1e300;
    for (int k = 0; k < repeats; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int repeats = 5;
    int threads = 0;
    for (int a = 1; a + 1 < argc; a += 2) {
        if (std::strcmp(argv[a], "--repeats") == 0) repeats = std::atoi(argv[a + 1]);
        else if (std::strcmp(argv[a], "--threads") == 0) threads = std::atoi(argv[a + 1]);
    }
    const int used = kernels::resolve_threads(threads);
    std::printf("threads: %d\n", used);

    // One slice worth of sweep terms: the default grid, 200 time lags.
    const GridSpec g;
    const ModelParams p;
    const double dz = (g.z_max - g.z_min) / (g.n_state - 1);
    const auto rule = gauss_hermite(g.n_quad);
    const double dt = p.horizon / (g.n_time - 1);
    std::vector<kernels::Stencil> stencils;
    int pad = 0;
    for (int lag = 1; lag < g.n_time; ++lag) {
        const double tau = lag * dt;
        const double shift = p.log_odds_drift() * tau / dz;
        const double scale = p.sigma * std::sqrt(tau) / dz;
        stencils.push_back(kernels::make_stencil(shift, scale, rule));
        pad = std::max(pad, kernels::required_padding(shift, scale, rule));
    }
    std::vector<std::vector<double>> tables(stencils.size());
    std::vector<kernels::SweepTerm> terms;
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        tables[k].resize(g.n_state + 2 * pad);
        for (std::size_t j = 0; j < tables[k].size(); ++j) {
            const double x = logistic(g.z_min + (static_cast<double>(j) - pad) * dz);
            tables[k][j] = std::log1p(x) * (1.0 + 0.01 * static_cast<double>(k));
        }
        const double tau = static_cast<double>(k + 1) * dt;
        terms.push_back({&stencils[k], tables[k], dt, p.log_odds_drift() * tau / dz,
                         p.sigma * std::sqrt(tau) / dz});
    }

    std::vector<double> ref(g.n_state, 0.0);
    std::vector<double> par(g.n_state, 0.0);
    const double t_ref = best_of(repeats, [&] {
        std::fill(ref.begin(), ref.end(), 0.0);
        kernels::sweep_reference(terms, rule, pad, ref);
    });
    const double t_par = best_of(repeats, [&] {
        std::fill(par.begin(), par.end(), 0.0);
        kernels::sweep_parallel(terms, pad, par, threads);
    });
    double diff = 0.0;
    for (int j = 0; j < g.n_state; ++j) diff = std::max(diff, std::abs(ref[j] - par[j]));
    std::printf("sweep (%d nodes x %zu lags): reference %.4f s, parallel %.4f s, speedup %.1fx, max diff %.2e\n",
                g.n_state, terms.size(), t_ref, t_par, t_ref / t_par, diff);

    // Whole solves on a coarser grid; the reference path is slow.
    GridSpec small;
    small.n_state = 201;
    small.n_time = 50;
    SolverOptions ref_opt;
    ref_opt.reference_kernel = true;
    SolverOptions par_opt;
    par_opt.threads = threads;
    SolveReport a;
    SolveReport b;
    const double s_ref = best_of(1, [&] { a = solve(p, small, ref_opt); });
    const double s_par = best_of(1, [&] { b = solve(p, small, par_opt); });
    double vdiff = 0.0;
    for (std::size_t i = 0; i < a.surface.u_values.size(); ++i) {
        for (std::size_t j = 0; j < a.surface.u_values[i].size(); ++j) {
            vdiff = std::max(vdiff, std::abs(a.surface.u_values[i][j] - b.surface.u_values[i][j]));
        }
    }
    std::printf("solve (%d x %d): reference %.3f s, parallel %.3f s, speedup %.1fx, max value diff %.2e\n",
                small.n_state, small.n_time, s_ref, s_par, s_ref / s_par, vdiff);
    return 0;
}
