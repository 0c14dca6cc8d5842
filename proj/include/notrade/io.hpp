#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "notrade/frictionless.hpp"
#include "notrade/hjb_solver.hpp"
#include "notrade/simulator.hpp"

// CSV export. Every real is written with 17 significant digits so that a
// file round-trips to the same doubles.
namespace notrade::io {

std::string format_real(double v);

/// Columns t, x, v; per slice the x = 0 row, the z nodes, then the x = 1 row.
void write_surface_csv(const std::filesystem::path& path, const ValueSurface& surface);

/// Columns t, y_lo, y_hi, lo_clamped, hi_clamped (clamp flags as 0/1).
void write_boundaries_csv(const std::filesystem::path& path, const NoTradeBoundaries& b);

/// Columns t, y0, vxx0, F, G, slope_lo, slope_hi, value_slope.
void write_asymptotics_csv(const std::filesystem::path& path,
                           const frictionless::AsymptoticReport& report);

struct SweepRow {
    double axis_value = 0.0;
    double y_lo = 0.0;
    double y_hi = 0.0;
    double v_at_y0 = 0.0;
    double width = 0.0;
    double value_loss = 0.0;
};

/// Columns <axis>, y_lo, y_hi, v_at_y0, width, value_loss.
void write_sweep_csv(const std::filesystem::path& path, const std::string& axis,
                     const std::vector<SweepRow>& rows);

/// Columns policy, mean_log_wealth, std_error, n_paths, mean_trade_count.
void write_simresult_csv(const std::filesystem::path& path,
                         const std::vector<sim::NamedResult>& results);

/// Columns path, time, x_pre, x_post, cost.
void write_trades_csv(const std::filesystem::path& path, const std::vector<sim::TradeRecord>& trades);

/// Reads a CSV written by this module into a header and numeric rows.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace notrade::io
