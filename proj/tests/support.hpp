#pragma once

// Shared fixtures: the renewal models are expensive to build, so each test
// binary constructs them once.

#include <memory>

#include "wetting/increment_law.hpp"
#include "wetting/renewal.hpp"
#include "wetting/well.hpp"

namespace testsupport {

inline std::shared_ptr<const wetting::RenewalModel> lazy_renewal(int n_max = 10000) {
    static auto m = std::make_shared<wetting::RenewalModel>(
        wetting::RenewalModel::from_law(wetting::IncrementLaw::lazy(0.4), n_max));
    return m;
}

inline std::shared_ptr<const wetting::RenewalModel> geometric_renewal(int n_max = 10000) {
    static auto m = std::make_shared<wetting::RenewalModel>(
        wetting::RenewalModel::from_law(wetting::IncrementLaw::geometric(0.4), n_max));
    return m;
}

inline std::shared_ptr<const wetting::RenewalModel> almost_geometric_renewal(int n_max = 10000) {
    static auto m = std::make_shared<wetting::RenewalModel>(
        wetting::RenewalModel::from_law(wetting::IncrementLaw::almost_geometric(3.0), n_max));
    return m;
}

inline const wetting::WellModel& lazy_well() {
    static wetting::WellModel w(lazy_renewal());
    return w;
}

inline const wetting::WellModel& geometric_well() {
    static wetting::WellModel w(geometric_renewal());
    return w;
}

inline const wetting::WellModel& almost_geometric_well() {
    static wetting::WellModel w(almost_geometric_renewal());
    return w;
}

// Closed-form flat free energy of the lazy walk: log of the positive root of
// (l-1)x^2 - l(l-1)(1-2g)x - l^2 g^2 = 0.
inline double lazy_free_energy_closed(double gamma, double lambda) {
    if (lambda <= 1.0 / (1.0 - gamma)) return 0.0;
    double A = lambda - 1.0;
    double B = -lambda * (lambda - 1.0) * (1.0 - 2.0 * gamma);
    double C = -lambda * lambda * gamma * gamma;
    double x = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
    return std::log(x);
}

inline double geometric_free_energy_closed(double gamma, double lambda) {
    if (lambda <= 1.0 / (1.0 - gamma)) return 0.0;
    return std::log(lambda * (lambda - 1.0) * (1.0 - gamma) * (1.0 - gamma) /
                    (lambda * (1.0 - gamma * gamma) - 1.0));
}

}  // namespace testsupport
