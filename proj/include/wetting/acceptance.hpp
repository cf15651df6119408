#pragma once

// The acceptance suite: every shipped guarantee, pinned to its tolerance, run
// end to end and reported one line per check.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace wetting {

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240810;
    int threads = 0;  // 0: WETTING_THREADS or hardware
};

// Runs all checks, streaming one PASS/FAIL line per check to `log`.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& log);

}  // namespace wetting
