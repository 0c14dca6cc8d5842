#include "notrade/model.hpp"

#include <sstream>

namespace notrade {

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw ValidationError(message);
    }
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

ModelParams validate(const ModelParams& p) {
    require(finite(p.mu), "mu must be finite");
    require(finite(p.r), "r must be finite");
    require(finite(p.sigma) && p.sigma > 0.0, "sigma must be positive");
    require(finite(p.lambda) && p.lambda >= 0.0, "lambda must be >= 0");
    require(finite(p.horizon) && p.horizon > 0.0, "horizon must be positive");
    require(finite(p.cost_buy) && p.cost_buy >= 0.0, "cost_buy must be >= 0");
    require(finite(p.cost_sell) && p.cost_sell >= 0.0, "cost_sell must be >= 0");
    require(p.cost_sell < 1.0, "cost_sell must be < 1");
    return p;
}

GridSpec validate(const GridSpec& g) {
    require(finite(g.z_min) && finite(g.z_max), "z bounds must be finite");
    require(g.z_min < 0.0 && 0.0 < g.z_max, "z_min < 0 < z_max is required");
    require(g.n_state >= 3, "n_state must be >= 3");
    require(g.n_time >= 2, "n_time must be >= 2");
    require(g.n_quad >= 2, "n_quad must be >= 2");
    require(finite(g.picard_tol) && g.picard_tol > 0.0, "picard_tol must be positive");
    require(g.picard_max_iter >= 1, "picard_max_iter must be >= 1");
    return g;
}

Grid make_grid(const GridSpec& spec, const ModelParams& params) {
    validate(spec);
    validate(params);
    Grid grid;
    grid.times.resize(static_cast<std::size_t>(spec.n_time));
    const double dt = params.horizon / (spec.n_time - 1);
    for (int i = 0; i < spec.n_time; ++i) {
        grid.times[i] = i * dt;
    }
    grid.times.back() = params.horizon;

    grid.z_nodes.resize(static_cast<std::size_t>(spec.n_state));
    const double dz = (spec.z_max - spec.z_min) / (spec.n_state - 1);
    for (int j = 0; j < spec.n_state; ++j) {
        grid.z_nodes[j] = spec.z_min + j * dz;
    }
    grid.z_nodes.back() = spec.z_max;
    return grid;
}

std::string describe(const ModelParams& p) {
    std::ostringstream os;
    os << "mu=" << p.mu << " r=" << p.r << " sigma=" << p.sigma << " lambda=" << p.lambda
       << " T=" << p.horizon << " beta=" << p.cost_buy << " eps=" << p.cost_sell;
    return os.str();
}

}  // namespace notrade
