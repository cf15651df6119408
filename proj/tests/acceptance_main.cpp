// Acceptance suite runner: one PASS/FAIL line per shipped guarantee.
// Exit code = number of failed checks.

#include <iostream>

#include "wetting/acceptance.hpp"

int main() {
    wetting::AcceptanceOptions opt;
    auto results = wetting::run_acceptance(opt, std::cout);
    int failed = 0;
    for (const auto& r : results)
        if (!r.pass) ++failed;
    std::cout << "\n" << (results.size() - failed) << "/" << results.size()
              << " acceptance checks passed\n";
    return failed;
}
