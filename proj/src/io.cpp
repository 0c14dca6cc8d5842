#include "notrade/io.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace notrade::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw std::runtime_error("error while writing file: " + path.string());
    }
}

}  // namespace

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_surface_csv(const std::filesystem::path& path, const ValueSurface& s) {
    auto out = open_out(path);
    out << "t,x,v\n";
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const std::string t = format_real(s.times[i]);
        out << t << ",0," << format_real(s.v_at_zero[i]) << '\n';
        for (std::size_t j = 0; j < s.z_nodes.size(); ++j) {
            out << t << ',' << format_real(logistic(s.z_nodes[j])) << ','
                << format_real(s.u_values[i][j]) << '\n';
        }
        out << t << ",1," << format_real(s.v_at_one[i]) << '\n';
    }
    finish(out, path);
}

void write_boundaries_csv(const std::filesystem::path& path, const NoTradeBoundaries& b) {
    auto out = open_out(path);
    out << "t,y_lo,y_hi,lo_clamped,hi_clamped\n";
    for (std::size_t i = 0; i < b.times.size(); ++i) {
        out << format_real(b.times[i]) << ',' << format_real(b.y_lo[i]) << ','
            << format_real(b.y_hi[i]) << ',' << (b.lo_clamped[i] ? 1 : 0) << ','
            << (b.hi_clamped[i] ? 1 : 0) << '\n';
    }
    finish(out, path);
}

void write_asymptotics_csv(const std::filesystem::path& path,
                           const frictionless::AsymptoticReport& r) {
    auto out = open_out(path);
    out << "t,y0,vxx0,F,G,slope_lo,slope_hi,value_slope\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) {
        out << format_real(r.times[i]) << ',' << format_real(r.y0[i]) << ','
            << format_real(r.vxx0[i]) << ',' << format_real(r.f_at_y0[i]) << ','
            << format_real(r.g[i]) << ',' << format_real(r.slope_lo[i]) << ','
            << format_real(r.slope_hi[i]) << ',' << format_real(r.value_slope[i]) << '\n';
    }
    finish(out, path);
}

void write_sweep_csv(const std::filesystem::path& path, const std::string& axis,
                     const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    out << axis << ",y_lo,y_hi,v_at_y0,width,value_loss\n";
    for (const auto& r : rows) {
        out << format_real(r.axis_value) << ',' << format_real(r.y_lo) << ','
            << format_real(r.y_hi) << ',' << format_real(r.v_at_y0) << ','
            << format_real(r.width) << ',' << format_real(r.value_loss) << '\n';
    }
    finish(out, path);
}

void write_simresult_csv(const std::filesystem::path& path,
                         const std::vector<sim::NamedResult>& results) {
    auto out = open_out(path);
    out << "policy,mean_log_wealth,std_error,n_paths,mean_trade_count\n";
    for (const auto& r : results) {
        out << r.name << ',' << format_real(r.result.mean_log_wealth) << ','
            << format_real(r.result.std_error) << ',' << r.result.n_paths << ','
            << format_real(r.result.mean_trade_count) << '\n';
    }
    finish(out, path);
}

void write_trades_csv(const std::filesystem::path& path,
                      const std::vector<sim::TradeRecord>& trades) {
    auto out = open_out(path);
    out << "path,time,x_pre,x_post,cost\n";
    for (const auto& t : trades) {
        out << t.path << ',' << format_real(t.time) << ',' << format_real(t.x_pre) << ','
            << format_real(t.x_post) << ',' << format_real(t.cost) << '\n';
    }
    finish(out, path);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read file: " + path.string());
    }
    CsvTable table;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    if (std::getline(in, line)) {
        table.header = split(line);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& c : split(line)) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace notrade::io
