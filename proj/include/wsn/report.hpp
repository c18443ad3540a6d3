#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/sim_engine.hpp"

namespace wsn::report {

inline constexpr const char* kRoundsCsvHeader =
    "round,alive,e_net_j,e_dissipated_avg_j,data_sent,data_delivered,"
    "control_packets,reclustered,ch_count";
inline constexpr int kRoundsCsvVersion = 1;

void write_rounds_csv(std::ostream& out, const SimResult& result);

// summary.json: protocol, seed, fnd/hnd/lnd, pdr, control totals, CH stats.
void write_summary_json(std::ostream& out, const std::string& protocol,
                        std::uint64_t seed, const SimResult& result);

// Validates a rounds.csv: header matches the versioned schema, every row
// parses, round numbers are 1..n, alive never increases. Returns an empty
// string on success, otherwise a "line N: ..." diagnostic.
std::string check_rounds_csv(std::istream& in);

struct Series {
    std::string label;
    std::string color;        // CSS color
    std::vector<double> x;
    std::vector<double> y;    // same length as x
};

// Standalone SVG line chart (axes, ticks, legend); no external dependencies.
std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series);

// Color-grid heatmap; cell (r,c) of `values` is shaded on a white-to-blue
// ramp between the grid min and max. Row/column labels are optional.
std::string render_color_grid(const std::string& title,
                              const std::vector<std::vector<double>>& values,
                              const std::vector<std::string>& row_labels,
                              const std::vector<std::string>& col_labels);

}  // namespace wsn::report
