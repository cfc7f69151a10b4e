#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace efimov::cli {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest text that holds 17 significant digits, '.' as separator.
std::string format_number(double v);
std::string format_number(long long v);

/// RFC 4180 field quoting: wraps in quotes when the field holds a comma,
/// quote, CR or LF, doubling embedded quotes.
std::string csv_field(const std::string& s);
std::string to_csv(const Table& table);

/// Writes table.csv-style output. Throws std::invalid_argument on an empty
/// table (no file is created) and std::runtime_error on I/O failure.
void emit_csv(const Table& table, const std::filesystem::path& path);

struct PlotData {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::pair<double, double>> points;
    std::vector<std::string> x_ticks;  ///< optional label for x = 0, 1, ...
    double hline = 0.0;
    std::string hline_label;
};

std::string to_svg(const PlotData& plot);
/// Same failure contract as emit_csv; an empty point list is an error.
void emit_svg(const PlotData& plot, const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace efimov::cli
