#pragma once

// Run-configuration building blocks shared by the CLI front-end and its
// tests: law specification, grid parsing, custom pmf tables.

#include <string>
#include <utility>
#include <vector>

#include "wetting/increment_law.hpp"

namespace wetting {

struct LawSpec {
    std::string family;       // "lazy" | "geometric" | "almost-geometric" | "custom"
    double gamma = 0.0;       // lazy / geometric parameter
    double theta = 0.0;       // almost-geometric parameter
    std::string table_path;   // custom laws: two-column "value probability" file
};

IncrementLaw build_law(const LawSpec& spec);

// "start:stop:step" (inclusive stop within half a step) or a single number.
std::vector<double> parse_grid(const std::string& text);

// Two-column text table: integer value, probability; '#' comments allowed.
std::vector<std::pair<int, double>> read_pmf_table(const std::string& path);

}  // namespace wetting
