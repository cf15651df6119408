#pragma once

// Increment-law families for the walk: probability tables, log-moment
// generating functions Lambda_{+/-}, exponential tilting and the
// (t0, rho, Lambda(t0)) profile that drives all saturation case logic.

#include <memory>
#include <utility>
#include <vector>

#include "wetting/numerics.hpp"

namespace wetting {

enum class Family { Lazy, Geometric, AlmostGeometric, Custom };

// Radii of convergence and limiting slopes of Lambda_{+/-}.
struct MgfProfile {
    ExtReal t0_plus, t0_minus;
    ExtReal rho_plus, rho_minus;
    ExtReal lambda_at_t0_plus, lambda_at_t0_minus;

    ExtReal t0(Sign s) const { return s == Sign::plus ? t0_plus : t0_minus; }
    ExtReal rho(Sign s) const { return s == Sign::plus ? rho_plus : rho_minus; }
    ExtReal lambda_at_t0(Sign s) const {
        return s == Sign::plus ? lambda_at_t0_plus : lambda_at_t0_minus;
    }
};

class TiltedLaw;

class IncrementLaw {
public:
    static IncrementLaw lazy(double gamma);
    static IncrementLaw geometric(double gamma);
    static IncrementLaw almost_geometric(double theta);
    // Table of (value, probability); renormalized, must be centered and
    // aperiodic.
    static IncrementLaw custom(const std::vector<std::pair<int, double>>& table);

    Family family() const { return family_; }
    double param() const { return param_; }

    // Truncated table access (the object the DPs convolve with).
    double pmf(int x) const {
        if (x < min_ || x > max_) return 0.0;
        return pmf_[static_cast<std::size_t>(x - min_)];
    }
    int table_min() const { return min_; }
    int table_max() const { return max_; }
    int truncation_radius() const { return k_max_; }
    double tail_mass_bound() const { return tail_mass_bound_; }

    // Extremal support points of the ideal family (pre-truncation).
    ExtReal xbar(Sign s) const { return s == Sign::plus ? xbar_plus_ : xbar_minus_; }

    double mean() const;       // 0 within tolerance by construction
    double variance() const;   // family variance sigma^2

    // Lambda_{sign}(t) for t >= 0; +inf past the radius of convergence.
    // Built-in families use their closed/series form, custom laws the table.
    double log_mgf(double t, Sign s) const;
    // dLambda/dt and d2Lambda/dt2; only valid where log_mgf is finite.
    double log_mgf_deriv(double t, Sign s) const;
    double log_mgf_deriv2(double t, Sign s) const;

    MgfProfile profile() const;

    // Exponential tilt by t (t < t0_plus; negative t allowed within -t0_minus).
    TiltedLaw tilt(double t) const;

    // Log of the truncated-sum MGF (cross-check route for the closed form),
    // together with a bound on the mass the truncation ignores at this t.
    std::pair<double, double> log_mgf_from_table(double t, Sign s) const;

private:
    IncrementLaw() = default;
    void build_table(double tail_target);

    Family family_ = Family::Custom;
    double param_ = 0.0;
    std::vector<double> pmf_;
    int min_ = 0, max_ = 0;
    int k_max_ = 0;
    double tail_mass_bound_ = 0.0;
    ExtReal xbar_plus_, xbar_minus_;
};

// A tilted law is a plain finite table (the truncation is re-derived from the
// family at the requested tilt, so the table is accurate at any t < t0).
class TiltedLaw {
public:
    TiltedLaw(std::vector<double> pmf, int min, double t, double mean, double var,
              std::shared_ptr<const IncrementLaw> base)
        : pmf_(std::move(pmf)), min_(min), t_(t), mean_(mean), var_(var),
          base_(std::move(base)) {}

    double pmf(int x) const {
        int i = x - min_;
        if (i < 0 || i >= static_cast<int>(pmf_.size())) return 0.0;
        return pmf_[static_cast<std::size_t>(i)];
    }
    int table_min() const { return min_; }
    int table_max() const { return min_ + static_cast<int>(pmf_.size()) - 1; }
    double tilt_parameter() const { return t_; }
    double mean() const { return mean_; }
    double variance() const { return var_; }

    // Composition: re-derived from the base family at total tilt t + s, so
    // tilt(tilt(law, s), t) and tilt(law, s + t) coincide exactly.
    TiltedLaw tilt(double s) const;

private:
    std::vector<double> pmf_;
    int min_;
    double t_;
    double mean_, var_;
    std::shared_ptr<const IncrementLaw> base_;
};

}  // namespace wetting
