#include "notrade/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "notrade/config.hpp"
#include "notrade/frictionless.hpp"
#include "notrade/hjb_solver.hpp"
#include "notrade/io.hpp"
#include "notrade/kernels.hpp"
#include "notrade/simulator.hpp"

namespace notrade::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for failures that should exit with kNumericalFailure.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::string out_dir = ".";
    std::string axis;
    std::string values;
    std::string policy = "optimal";
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    int threads = 0;
    bool trades = false;
};

json real(double v) {
    // JSON has no infinities; keep them readable as strings.
    if (std::isfinite(v)) return v;
    return io::format_real(v);
}

json params_json(const ModelParams& p) {
    return {{"mu", p.mu},           {"r", p.r},
            {"sigma", p.sigma},     {"lambda", p.lambda},
            {"horizon", p.horizon}, {"cost_buy", p.cost_buy},
            {"cost_sell", p.cost_sell}};
}

json grid_json(const GridSpec& g) {
    return {{"z_min", g.z_min},           {"z_max", g.z_max},
            {"n_state", g.n_state},       {"n_time", g.n_time},
            {"n_quad", g.n_quad},         {"picard_tol", g.picard_tol},
            {"picard_max_iter", g.picard_max_iter}};
}

json solve_json(const SolveReport& rep) {
    const auto most = std::max_element(rep.picard_iterations.begin(), rep.picard_iterations.end());
    json j = {{"converged", rep.converged},
              {"final_residual", rep.final_residual},
              {"max_picard_iterations", most == rep.picard_iterations.end() ? 0 : *most}};
    const auto onset = lower_clamp_onset(rep.boundaries);
    j["lower_clamp_onset"] = onset ? json(*onset) : json(nullptr);
    return j;
}

class Run {
public:
    Run(std::string command, const Options& opt) : command_(std::move(command)), opt_(opt) {
        cfg_ = load_config(opt.config);
        out_ = opt.out_dir;
        std::error_code ec;
        fs::create_directories(out_, ec);
        if (ec) {
            throw ConfigError("cannot create output directory: " + out_.string());
        }
        manifest_ = {{"command", command_},
                     {"config_path", opt.config},
                     {"config", to_config_text(cfg_)},
                     {"params", params_json(cfg_.params)},
                     {"grid", grid_json(cfg_.grid)},
                     {"threads", kernels::resolve_threads(opt.threads)},
                     {"outputs", json::array()}};
    }

    const RunConfig& cfg() const { return cfg_; }
    fs::path file(const std::string& name) {
        manifest_["outputs"].push_back((out_ / name).string());
        return out_ / name;
    }
    json& manifest() { return manifest_; }

    void finish() {
        const double secs = std::chrono::duration<double>(Clock::now() - start_).count();
        manifest_["wall_clock_seconds"] = secs;
        const auto path = out_ / "manifest.json";
        std::ofstream f(path);
        if (!f) {
            throw std::runtime_error("cannot write file: " + path.string());
        }
        f << manifest_.dump(2) << '\n';
    }

private:
    using Clock = std::chrono::steady_clock;
    std::string command_;
    Options opt_;
    RunConfig cfg_;
    fs::path out_;
    json manifest_;
    Clock::time_point start_ = Clock::now();
};

SolverOptions solver_options(const Options& opt) {
    SolverOptions s;
    s.threads = opt.threads;
    return s;
}

SolveReport checked_solve(const ModelParams& p, const GridSpec& g, const Options& opt) {
    try {
        return solve(p, g, solver_options(opt));
    } catch (const ConcavityError& e) {
        throw NumericalFailure(e.what());
    }
}

std::size_t grid_index(const std::vector<double>& times, double t) {
    const auto it = std::min_element(times.begin(), times.end(), [t](double a, double b) {
        return std::abs(a - t) < std::abs(b - t);
    });
    const auto i = static_cast<std::size_t>(it - times.begin());
    if (std::abs(times[i] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
        throw ConfigError("sweep_time " + io::format_real(t) +
                          " does not fall on the time grid; adjust n_time");
    }
    return i;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0) {
            throw ConfigError("invalid entry in --values: '" + cell + "'");
        }
        v.push_back(x);
    }
    if (v.empty()) throw ConfigError("--values is empty");
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (!(v[k] > 0.0)) throw ConfigError("--values entries must be positive");
        if (k > 0 && !(v[k] > v[k - 1])) throw ConfigError("--values must be strictly increasing");
    }
    return v;
}

int cmd_solve(const Options& opt, std::ostream& out) {
    Run run("solve", opt);
    const auto rep = checked_solve(run.cfg().params, run.cfg().grid, opt);
    io::write_surface_csv(run.file("surface.csv"), rep.surface);
    io::write_boundaries_csv(run.file("boundaries.csv"), rep.boundaries);
    run.manifest()["solver"] = solve_json(rep);
    run.finish();
    if (!rep.converged) {
        throw NumericalFailure("Picard iteration did not converge (residual " +
                               io::format_real(rep.final_residual) + ")");
    }
    out << "solve: v(0, merton) = "
        << io::format_real(rep.surface.value(
               0, std::clamp(run.cfg().params.merton_fraction(), 0.0, 1.0)))
        << ", y_lo(0) = " << io::format_real(rep.boundaries.y_lo[0])
        << ", y_hi(0) = " << io::format_real(rep.boundaries.y_hi[0]) << '\n';
    return kSuccess;
}

int cmd_asymptotics(const Options& opt, std::ostream& out) {
    Run run("asymptotics", opt);
    const auto rule = gauss_hermite(run.cfg().grid.n_quad);
    frictionless::AsymptoticReport rep;
    try {
        rep = frictionless::asymptotic_report(run.cfg().params, run.cfg().grid, rule);
    } catch (const DomainError& e) {
        throw NumericalFailure(e.what());
    }
    io::write_asymptotics_csv(run.file("asymptotics.csv"), rep);
    run.finish();
    out << "asymptotics: y0(0) = " << io::format_real(rep.y0.front())
        << ", value_slope(0) = " << io::format_real(rep.value_slope.front()) << '\n';
    return kSuccess;
}

int cmd_sweep(const Options& opt, std::ostream& out) {
    if (opt.axis != "epsilon" && opt.axis != "lambda") {
        throw ConfigError("--axis must be epsilon or lambda");
    }
    const auto values = parse_values(opt.values);
    Run run("sweep", opt);
    const auto& cfg = run.cfg();
    const double t = cfg.sweep_time.value_or(0.0);
    const auto rule = gauss_hermite(cfg.grid.n_quad);
    const auto index = grid_index(make_grid(cfg.grid, cfg.params).times, t);

    std::vector<io::SweepRow> rows;
    json solves = json::array();
    std::map<double, std::pair<double, double>> baselines;  // lambda -> (y0, v0 at y0)
    auto baseline = [&](const ModelParams& p) {
        auto it = baselines.find(p.lambda);
        if (it != baselines.end()) return it->second;
        ModelParams p0 = p;
        p0.cost_buy = p0.cost_sell = 0.0;
        double y = 0.0;
        try {
            y = frictionless::y0(p0, t, rule);
        } catch (const DomainError& e) {
            throw NumericalFailure(e.what());
        }
        const auto rep = checked_solve(p0, cfg.grid, opt);
        if (!rep.converged) throw NumericalFailure("baseline solve did not converge");
        const std::pair<double, double> b{y, rep.surface.value(index, y)};
        baselines.emplace(p.lambda, b);
        return b;
    };

    for (double value : values) {
        ModelParams p = cfg.params;
        if (opt.axis == "epsilon") {
            p.cost_buy = p.cost_sell = value;
        } else {
            p.lambda = value;
        }
        p = validate(p);
        const auto [y0, v0] = baseline(p);
        const auto rep = checked_solve(p, cfg.grid, opt);
        auto info = solve_json(rep);
        info["value"] = value;
        solves.push_back(info);
        if (!rep.converged) {
            throw NumericalFailure("solve at " + opt.axis + " = " + io::format_real(value) +
                                   " did not converge");
        }
        io::SweepRow row;
        row.axis_value = value;
        row.y_lo = rep.boundaries.y_lo[index];
        row.y_hi = rep.boundaries.y_hi[index];
        row.v_at_y0 = rep.surface.value(index, y0);
        row.width = row.y_hi - row.y_lo;
        row.value_loss = v0 - row.v_at_y0;
        rows.push_back(row);
    }
    io::write_sweep_csv(run.file("sweep.csv"), opt.axis, rows);
    run.manifest()["axis"] = opt.axis;
    run.manifest()["values"] = values;
    run.manifest()["sweep_time"] = t;
    run.manifest()["solver"] = solves;
    run.finish();
    out << "sweep: " << rows.size() << " solves at t = " << io::format_real(t) << '\n';
    return kSuccess;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
    if (opt.policy != "optimal" && opt.policy != "never" && opt.policy != "merton") {
        throw ConfigError("--policy must be optimal, never or merton");
    }
    if (opt.paths <= 0) throw ConfigError("--paths must be positive");
    Run run("simulate", opt);
    const auto& cfg = run.cfg();
    sim::SimConfig sc;
    sc.n_paths = opt.paths;
    sc.seed = opt.seed;
    sc.x0 = cfg.x0.value_or(std::clamp(cfg.params.merton_fraction(), 0.0, 1.0));
    sc.w0 = cfg.w0.value_or(1.0);
    sc.record_trades = opt.trades;
    sc.threads = opt.threads;

    sim::Policy policy;
    if (opt.policy == "optimal") {
        const auto rep = checked_solve(cfg.params, cfg.grid, opt);
        run.manifest()["solver"] = solve_json(rep);
        if (!rep.converged) throw NumericalFailure("solve did not converge");
        run.manifest()["solver_value"] = std::log(sc.w0) + rep.surface.value(0, sc.x0);
        policy = sim::optimal_policy(rep.boundaries);
    } else if (opt.policy == "never") {
        policy = sim::never_trade();
    } else {
        policy = sim::constant_target(std::clamp(cfg.params.merton_fraction(), 0.0, 1.0));
    }
    const auto res = sim::simulate(cfg.params, policy, sc);
    io::write_simresult_csv(run.file("simresult.csv"), {{opt.policy, res}});
    if (res.trade_log) {
        io::write_trades_csv(run.file("trades.csv"), *res.trade_log);
    }
    run.manifest()["policy"] = opt.policy;
    run.manifest()["paths"] = opt.paths;
    run.manifest()["seed"] = opt.seed;
    run.manifest()["x0"] = sc.x0;
    run.manifest()["w0"] = sc.w0;
    run.manifest()["mean_log_wealth"] = real(res.mean_log_wealth);
    run.manifest()["std_error"] = real(res.std_error);
    run.finish();
    out << "simulate: mean ln W_T = " << io::format_real(res.mean_log_wealth) << " +- "
        << io::format_real(res.std_error) << '\n';
    return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal investment with Poisson trading times and proportional costs"};
    app.require_subcommand(1);
    Options opt;

    auto common = [&opt](CLI::App* sub) {
        sub->add_option("--config", opt.config, "key = value configuration file")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--threads", opt.threads, "worker threads (0 = auto)")
            ->check(CLI::NonNegativeNumber);
    };
    auto* solve_cmd = app.add_subcommand("solve", "value surface and no-trade boundaries");
    common(solve_cmd);
    auto* asym_cmd = app.add_subcommand("asymptotics", "zero-cost oracle and first-order slopes");
    common(asym_cmd);
    auto* sweep_cmd = app.add_subcommand("sweep", "boundaries and value at sweep_time across a parameter");
    common(sweep_cmd);
    sweep_cmd->add_option("--axis", opt.axis, "epsilon or lambda")->required();
    sweep_cmd->add_option("--values", opt.values, "comma-separated increasing positive values")
        ->required();
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of E[ln W_T]");
    common(sim_cmd);
    sim_cmd->add_option("--policy", opt.policy, "optimal, never or merton");
    sim_cmd->add_option("--paths", opt.paths, "number of paths");
    sim_cmd->add_option("--seed", opt.seed, "random seed");
    sim_cmd->add_flag("--trades", opt.trades, "also write trades.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream eo;
        const int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(opt, out);
        if (asym_cmd->parsed()) return cmd_asymptotics(opt, out);
        if (sweep_cmd->parsed()) return cmd_sweep(opt, out);
        return cmd_simulate(opt, out);
    } catch (const NumericalFailure& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const ConcavityError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace notrade::cli
