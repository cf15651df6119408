#pragma once

// Deterministic file emission: CSV with fixed 17-significant-digit floats and
// a small hand-rolled SVG line plot (axes, ticks, polylines, vertical
// markers). Byte-identical output for identical inputs.

#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace wetting {

std::string format_double(double v);  // %.17g

using CsvCell = std::variant<double, long long, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<CsvCell>& cells);

private:
    std::ofstream out_;
};

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    std::vector<std::pair<double, double>> points;
};

struct SvgMarker {
    double x = 0.0;
    std::string label;
    std::string color = "#888888";
};

class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add_series(SvgSeries s) { series_.push_back(std::move(s)); }
    void add_marker(SvgMarker m) { markers_.push_back(std::move(m)); }
    void write(const std::string& path) const;

private:
    std::string title_, xlabel_, ylabel_;
    std::vector<SvgSeries> series_;
    std::vector<SvgMarker> markers_;
};

}  // namespace wetting
