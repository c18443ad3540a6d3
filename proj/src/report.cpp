#include "wsn/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wsn::report {

void write_rounds_csv(std::ostream& out, const SimResult& result) {
    out << "# schema: rounds.csv v" << kRoundsCsvVersion << '\n' << kRoundsCsvHeader << '\n';
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(12);
    for (const auto& r : result.per_round) {
        line.str("");
        line << r.round << ',' << r.alive << ',' << r.e_net << ',' << r.e_dissipated_avg
             << ',' << r.data_sent << ',' << r.data_delivered << ',' << r.control_packets
             << ',' << (r.reclustered ? 1 : 0) << ',' << r.ch_count << '\n';
        out << line.str();
    }
}

void write_summary_json(std::ostream& out, const std::string& protocol,
                        std::uint64_t seed, const SimResult& result) {
    nlohmann::json j;
    j["protocol"] = protocol;
    j["seed"] = seed;
    j["rounds"] = result.per_round.size();
    j["fnd"] = result.fnd;
    j["hnd"] = result.hnd;
    j["lnd"] = result.lnd;
    j["pdr"] = result.pdr;
    j["control_packets"] = result.total_control_packets;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [k, v] : result.ch_count_histogram) hist[std::to_string(k)] = v;
    j["ch_count_histogram"] = hist;
    j["ch_selection_count"] = result.ch_selection_count;
    out << j.dump(2) << '\n';
}

std::string check_rounds_csv(std::istream& in) {
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) return "line 1: empty file";
    ++lineno;
    if (line != "# schema: rounds.csv v" + std::to_string(kRoundsCsvVersion))
        return "line 1: missing or mismatched schema marker";
    if (!std::getline(in, line)) return "line 2: missing header";
    ++lineno;
    if (line != kRoundsCsvHeader) return "line 2: header does not match schema";

    long expected_round = 1;
    long prev_alive = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) return "line " + std::to_string(lineno) + ": empty row";
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (cells.size() != 9)
            return "line " + std::to_string(lineno) + ": expected 9 columns, got " +
                   std::to_string(cells.size());
        try {
            std::size_t pos = 0;
            const long round = std::stol(cells[0], &pos);
            if (pos != cells[0].size()) throw std::invalid_argument("round");
            const long alive = std::stol(cells[1]);
            (void)std::stod(cells[2]);
            (void)std::stod(cells[3]);
            for (const int i : {4, 5, 6, 8})
                if (std::stol(cells[static_cast<std::size_t>(i)]) < 0)
                    throw std::invalid_argument("negative count");
            if (cells[7] != "0" && cells[7] != "1") throw std::invalid_argument("reclustered");
            if (round != expected_round)
                return "line " + std::to_string(lineno) + ": round " + std::to_string(round) +
                       ", expected " + std::to_string(expected_round);
            if (prev_alive >= 0 && alive > prev_alive)
                return "line " + std::to_string(lineno) + ": alive count increased";
            prev_alive = alive;
            ++expected_round;
        } catch (const std::exception&) {
            return "line " + std::to_string(lineno) + ": unparsable cell";
        }
    }
    return "";
}

namespace {

constexpr double kW = 720, kH = 440;
constexpr double kML = 70, kMR = 20, kMT = 40, kMB = 50;  // margins

std::string fmt(double v) {
    std::ostringstream o;
    if (std::abs(v) >= 1e5 || (v != 0 && std::abs(v) < 1e-3)) {
        o << std::scientific << std::setprecision(1) << v;
    } else {
        o << std::setprecision(6) << v;
    }
    return o.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// "Nice" tick step: 1/2/5 times a power of 10 covering roughly 5 intervals.
double nice_step(double span) {
    if (span <= 0) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    if (norm < 1.5) return mag;
    if (norm < 3.5) return 2 * mag;
    if (norm < 7.5) return 5 * mag;
    return 10 * mag;
}

}  // namespace

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::vector<Series>& series) {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;

    const double pw = kW - kML - kMR, ph = kH - kMT - kMB;
    const auto sx = [&](double x) { return kML + (x - xmin) / (xmax - xmin) * pw; };
    const auto sy = [&](double y) { return kH - kMB - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream o;
    o.precision(2);
    o.setf(std::ios::fixed);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">" << escape(title) << "</text>\n";

    // axes + ticks
    o << "<line x1=\"" << kML << "\" y1=\"" << kH - kMB << "\" x2=\"" << kW - kMR << "\" y2=\""
      << kH - kMB << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kML << "\" y1=\"" << kMT << "\" x2=\"" << kML << "\" y2=\""
      << kH - kMB << "\" stroke=\"black\"/>\n";
    const double xstep = nice_step(xmax - xmin);
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-9 * xstep; t += xstep) {
        o << "<line x1=\"" << sx(t) << "\" y1=\"" << kH - kMB << "\" x2=\"" << sx(t)
          << "\" y2=\"" << kH - kMB + 5 << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << sx(t) << "\" y=\"" << kH - kMB + 18
          << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(t)
          << "</text>\n";
    }
    const double ystep = nice_step(ymax - ymin);
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-9 * ystep; t += ystep) {
        o << "<line x1=\"" << kML - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << kML << "\" y2=\""
          << sy(t) << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << kML - 8 << "\" y=\"" << sy(t) + 4
          << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(t)
          << "</text>\n";
    }
    o << "<text x=\"" << kML + pw / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
      << escape(x_label) << "</text>\n"
      << "<text x=\"16\" y=\"" << kMT + ph / 2
      << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " << kMT + ph / 2 << ")\">" << escape(y_label)
      << "</text>\n";

    for (const auto& s : series) {
        if (s.x.empty()) continue;
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            o << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
        o << "\"/>\n";
    }

    double ly = kMT + 8;
    for (const auto& s : series) {
        o << "<line x1=\"" << kW - kMR - 130 << "\" y1=\"" << ly << "\" x2=\"" << kW - kMR - 110
          << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << kW - kMR - 104 << "\" y=\"" << ly + 4
          << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape(s.label) << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

std::string render_color_grid(const std::string& title,
                              const std::vector<std::vector<double>>& values,
                              const std::vector<std::string>& row_labels,
                              const std::vector<std::string>& col_labels) {
    const std::size_t rows = values.size();
    const std::size_t cols = rows ? values.front().size() : 0;
    double lo = 0, hi = 1;
    bool first = true;
    for (const auto& r : values)
        for (const double v : r) {
            if (first) { lo = hi = v; first = false; }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi == lo) hi = lo + 1;

    const double cell = 36, lx = 70, ty = 56;
    const double w = lx + cell * static_cast<double>(cols) + 20;
    const double h = ty + cell * static_cast<double>(rows) + 20;
    std::ostringstream o;
    o.precision(2);
    o.setf(std::ios::fixed);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\" "
         "font-family=\"sans-serif\">" << escape(title) << "</text>\n";
    for (std::size_t c = 0; c < cols; ++c) {
        if (c < col_labels.size())
            o << "<text x=\"" << lx + cell * (static_cast<double>(c) + 0.5) << "\" y=\""
              << ty - 8 << "\" text-anchor=\"middle\" font-size=\"11\" "
                 "font-family=\"sans-serif\">" << escape(col_labels[c]) << "</text>\n";
    }
    for (std::size_t r = 0; r < rows; ++r) {
        if (r < row_labels.size())
            o << "<text x=\"" << lx - 6 << "\" y=\"" << ty + cell * (static_cast<double>(r) + 0.6)
              << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
              << escape(row_labels[r]) << "</text>\n";
        for (std::size_t c = 0; c < cols; ++c) {
            const double t = (values[r][c] - lo) / (hi - lo);
            const int rb = static_cast<int>(std::lround(255 * (1 - t)));
            o << "<rect x=\"" << lx + cell * static_cast<double>(c) << "\" y=\""
              << ty + cell * static_cast<double>(r) << "\" width=\"" << cell << "\" height=\""
              << cell << "\" fill=\"rgb(" << rb << ',' << rb
              << ",255)\" stroke=\"#ccc\"/>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace wsn::report
