#include "wetting/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace wetting {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out_ << (i ? "," : "") << header[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ",";
        if (std::holds_alternative<double>(cells[i]))
            out_ << format_double(std::get<double>(cells[i]));
        else if (std::holds_alternative<long long>(cells[i]))
            out_ << std::get<long long>(cells[i]);
        else
            out_ << std::get<std::string>(cells[i]);
    }
    out_ << "\n";
}

namespace {

constexpr int kWidth = 720, kHeight = 480;
constexpr int kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

// round a span to a pleasant tick step
double tick_step(double span) {
    double raw = span / 6.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double r = raw / mag;
    if (r < 1.5) return mag;
    if (r < 3.5) return 2.0 * mag;
    if (r < 7.5) return 5.0 * mag;
    return 10.0 * mag;
}

std::string trim_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

void SvgPlot::write(const std::string& path) const {
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool first = true;
    for (const auto& s : series_)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) { xmin = xmax = x; ymin = ymax = y; first = false; }
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    for (const auto& m : markers_) {
        if (first) { xmin = xmax = m.x; first = false; }
        xmin = std::min(xmin, m.x); xmax = std::max(xmax, m.x);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    double xpad = 0.03 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto X = [&](double x) {
        return kMarginL + (x - xmin) / (xmax - xmin) * (kWidth - kMarginL - kMarginR);
    };
    auto Y = [&](double y) {
        return kHeight - kMarginB - (y - ymin) / (ymax - ymin) * (kHeight - kMarginT - kMarginB);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

    // axes
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kHeight - kMarginB << "\" x2=\""
        << kWidth - kMarginR << "\" y2=\"" << kHeight - kMarginB
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL
        << "\" y2=\"" << kHeight - kMarginB << "\" stroke=\"black\"/>\n";

    double xs = tick_step(xmax - xmin);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12; t += xs) {
        out << "<line x1=\"" << X(t) << "\" y1=\"" << kHeight - kMarginB << "\" x2=\""
            << X(t) << "\" y2=\"" << kHeight - kMarginB + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << X(t) << "\" y=\"" << kHeight - kMarginB + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_number(t) << "</text>\n";
    }
    double ys = tick_step(ymax - ymin);
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12; t += ys) {
        out << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << Y(t) << "\" x2=\"" << kMarginL
            << "\" y2=\"" << Y(t) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginL - 8 << "\" y=\"" << Y(t) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << trim_number(t) << "</text>\n";
    }
    out << "<text x=\"" << (kMarginL + kWidth - kMarginR) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xlabel_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kMarginT + kHeight - kMarginB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 16 " << (kMarginT + kHeight - kMarginB) / 2 << ")\">"
        << ylabel_ << "</text>\n";

    for (const auto& m : markers_) {
        out << "<line x1=\"" << X(m.x) << "\" y1=\"" << kMarginT << "\" x2=\"" << X(m.x)
            << "\" y2=\"" << kHeight - kMarginB << "\" stroke=\"" << m.color
            << "\" stroke-dasharray=\"5,4\"/>\n";
        if (!m.label.empty())
            out << "<text x=\"" << X(m.x) + 4 << "\" y=\"" << kMarginT + 14
                << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << m.color
                << "\">" << m.label << "</text>\n";
    }

    int legend_y = kMarginT + 8;
    for (const auto& s : series_) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            out << X(x) << "," << Y(y) << " ";
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<line x1=\"" << kWidth - 180 << "\" y1=\"" << legend_y << "\" x2=\""
                << kWidth - 160 << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
                << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << kWidth - 154 << "\" y=\"" << legend_y + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
                << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
}

}  // namespace wetting
