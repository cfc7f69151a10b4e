#include "efimov/cli/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace efimov::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_number(long long v) { return std::to_string(v); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

void append_line(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out += ',';
        out += csv_field(fields[i]);
    }
    out += '\n';
}

}  // namespace

std::string to_csv(const Table& table) {
    std::string out;
    append_line(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::invalid_argument("to_csv: row width differs from header");
        }
        append_line(out, row);
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    f << text;
    f.close();
    if (!f) {
        throw std::runtime_error("write to " + path.string() + " failed");
    }
}

void emit_csv(const Table& table, const std::filesystem::path& path) {
    if (table.header.empty() || table.rows.empty()) {
        throw std::invalid_argument("emit_csv: empty table, nothing written");
    }
    write_text(path, to_csv(table));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string to_svg(const PlotData& plot) {
    if (plot.points.empty()) {
        throw std::invalid_argument("emit_svg: empty series, nothing written");
    }
    double xmin = plot.points.front().first, xmax = xmin;
    double ymin = plot.hline, ymax = plot.hline;
    for (const auto& [x, y] : plot.points) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    } else {
        const double pad = 0.05 * (xmax - xmin);
        xmin -= pad;
        xmax += pad;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    } else {
        const double pad = 0.08 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    const auto sy = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fixed(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape_xml(plot.title) << "</text>\n";

    // Axes.
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + ph) << "\" x2=\"" << fixed(kLeft + pw)
       << "\" y2=\"" << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
       << fixed(kTop + ph) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double y = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(sy(y) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
           << fixed(y, 4) << "</text>\n";
    }
    for (std::size_t i = 0; i < plot.x_ticks.size(); ++i) {
        const double x = static_cast<double>(i);
        if (x < xmin || x > xmax) continue;
        os << "<text x=\"" << fixed(sx(x)) << "\" y=\"" << fixed(kTop + ph + 16)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << escape_xml(plot.x_ticks[i]) << "</text>\n";
    }
    os << "<text x=\"" << fixed(kLeft + pw / 2) << "\" y=\"" << fixed(kHeight - 14)
       << "\" text-anchor=\"middle\" font-size=\"13\">" << escape_xml(plot.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << fixed(kTop + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << fixed(kTop + ph / 2) << ")\">" << escape_xml(plot.y_label) << "</text>\n";

    // Edge line.
    os << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(sy(plot.hline)) << "\" x2=\"" << fixed(kLeft + pw)
       << "\" y2=\"" << fixed(sy(plot.hline)) << "\" stroke=\"firebrick\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << fixed(kLeft + pw - 4) << "\" y=\"" << fixed(sy(plot.hline) - 5)
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"firebrick\">" << escape_xml(plot.hline_label) << "</text>\n";

    for (const auto& [x, y] : plot.points) {
        os << "<circle cx=\"" << fixed(sx(x)) << "\" cy=\"" << fixed(sy(y)) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void emit_svg(const PlotData& plot, const std::filesystem::path& path) { write_text(path, to_svg(plot)); }

}  // namespace efimov::cli
