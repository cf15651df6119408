#include "wetting/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wetting {

IncrementLaw build_law(const LawSpec& spec) {
    if (spec.family == "lazy") return IncrementLaw::lazy(spec.gamma);
    if (spec.family == "geometric") return IncrementLaw::geometric(spec.gamma);
    if (spec.family == "almost-geometric") return IncrementLaw::almost_geometric(spec.theta);
    if (spec.family == "custom") return IncrementLaw::custom(read_pmf_table(spec.table_path));
    throw std::invalid_argument("unknown law family: '" + spec.family + "'");
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> values;
    auto first = text.find(':');
    if (first == std::string::npos) {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("bad grid value: " + text);
        values.push_back(v);
        return values;
    }
    auto second = text.find(':', first + 1);
    if (second == std::string::npos)
        throw std::invalid_argument("grid must be start:stop:step, got: " + text);
    double start = std::stod(text.substr(0, first));
    double stop = std::stod(text.substr(first + 1, second - first - 1));
    double step = std::stod(text.substr(second + 1));
    if (!(step > 0.0) || stop < start)
        throw std::invalid_argument("grid needs stop >= start and step > 0: " + text);
    for (double v = start; v <= stop + 0.5 * step; v += step)
        values.push_back(std::min(v, stop));
    return values;
}

std::vector<std::pair<int, double>> read_pmf_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read pmf table: " + path);
    std::vector<std::pair<int, double>> table;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        int x;
        double p;
        if (ss >> x >> p) table.push_back({x, p});
    }
    if (table.empty()) throw std::invalid_argument("empty pmf table: " + path);
    return table;
}

}  // namespace wetting
