#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "notrade/io.hpp"

using namespace notrade;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "notrade_io_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("17 significant digits round-trip doubles") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(rng) * std::pow(10.0, k % 20 - 10);
        CHECK(std::stod(io::format_real(v)) == v);
    }
    CHECK(io::format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("surface and boundary files") {
    ValueSurface s;
    s.times = {0.0, 1.0};
    s.z_nodes = {-1.0, 0.0, 1.0};
    s.u_values = {{0.1, 0.2, 0.15}, {0.0, 0.0, 0.0}};
    s.v_at_zero = {0.05, 0.0};
    s.v_at_one = {0.01, 0.0};
    io::write_surface_csv(scratch("surface.csv"), s);
    const auto t = io::read_csv(scratch("surface.csv"));
    CHECK(t.header == std::vector<std::string>{"t", "x", "v"});
    REQUIRE(t.rows.size() == 10);
    CHECK(t.rows[0] == std::vector<double>{0.0, 0.0, 0.05});
    CHECK(t.rows[2][1] == 0.5);
    CHECK(t.rows[2][2] == 0.2);
    CHECK(t.rows[4] == std::vector<double>{0.0, 1.0, 0.01});

    NoTradeBoundaries b{{0.0, 1.0}, {0.2, 0.0}, {0.4, 1.0}, {false, true}, {false, true}};
    io::write_boundaries_csv(scratch("boundaries.csv"), b);
    const auto bt = io::read_csv(scratch("boundaries.csv"));
    CHECK(bt.header == std::vector<std::string>{"t", "y_lo", "y_hi", "lo_clamped", "hi_clamped"});
    CHECK(bt.rows[0] == std::vector<double>{0.0, 0.2, 0.4, 0.0, 0.0});
    CHECK(bt.rows[1] == std::vector<double>{1.0, 0.0, 1.0, 1.0, 1.0});
}

TEST_CASE("asymptotics file keeps infinite slopes readable") {
    frictionless::AsymptoticReport r;
    r.times = {0.0, 1.0};
    r.y0 = {0.29, 0.3};
    r.vxx0 = {-0.2, 0.0};
    r.f_at_y0 = {0.01, 0.0};
    r.g = {0.03, 0.0};
    r.slope_lo = {-5.0, -std::numeric_limits<double>::infinity()};
    r.slope_hi = {5.0, std::numeric_limits<double>::infinity()};
    r.value_slope = {0.05, 0.0};
    io::write_asymptotics_csv(scratch("asym.csv"), r);
    const auto t = io::read_csv(scratch("asym.csv"));
    CHECK(t.header.size() == 8);
    CHECK(t.header[3] == "F");
    CHECK(std::isinf(t.rows[1][5]));
    CHECK(t.rows[1][5] < 0.0);
}

TEST_CASE("simulation files") {
    sim::SimResult r;
    r.mean_log_wealth = 0.1;
    r.std_error = 0.001;
    r.n_paths = 10;
    r.mean_trade_count = 0.5;
    io::write_simresult_csv(scratch("sim.csv"), {{"never", r}});
    const auto t = io::read_csv(scratch("sim.csv"));
    CHECK(t.header[0] == "policy");
    CHECK(t.rows[0][1] == 0.1);
    CHECK(t.rows[0][3] == 10.0);
    io::write_trades_csv(scratch("trades.csv"), {{3, 0.5, 0.1, 0.2, 0.004}});
    const auto tt = io::read_csv(scratch("trades.csv"));
    CHECK(tt.header == std::vector<std::string>{"path", "time", "x_pre", "x_post", "cost"});
    CHECK(tt.rows[0] == std::vector<double>{3.0, 0.5, 0.1, 0.2, 0.004});
}

TEST_CASE("unwritable paths raise") {
    CHECK_THROWS_AS(io::write_sweep_csv("/nonexistent/dir/sweep.csv", "epsilon", {}), std::runtime_error);
    CHECK_THROWS_AS(io::read_csv("/nonexistent/file.csv"), std::runtime_error);
}
