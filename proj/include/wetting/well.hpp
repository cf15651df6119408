#pragma once

// Square-well variational problem: psi(lambda, a), its closed form, the
// maximizer set with the saturation case analysis, critical depth/curves and
// the transition constants.

#include <memory>
#include <utility>
#include <vector>

#include "wetting/rate_function.hpp"
#include "wetting/renewal.hpp"

namespace wetting {

enum class WellRegime {
    Dry,
    WetCramer,
    WetSaturatedLeft,
    WetSaturatedRight,
    WetSaturatedBoth,
    BoundaryLeft,   // lambda = lambda_-
    BoundaryRight,  // lambda = lambda_+
    BoundaryBoth,
};

const char* to_string(WellRegime r);

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool is_point() const { return lo == hi; }
};

struct WellSolution {
    double psi = 0.0;          // -inf when infeasible (a > abar)
    double free_energy = 0.0;  // max(psi, 0)
    WellRegime regime = WellRegime::Dry;
    Interval U_star, V_star;
    ExtReal w_minus, w_plus;   // a / Lambda' o Lambda^{-1}(F)
    double u_star = 0.0, v_star = 0.0;  // representative maximizer (NaN if interval)
    ExtReal lambda_minus, lambda_plus;
    double theta_minus = 0.0, theta_plus = 0.0;  // contact angles, radians
};

struct CriticalDepth {
    double a_c = 0.0;
    bool supercritical = false;  // false <=> lambda <= lambda_c, a_c pinned to 0
};

struct TransitionReport {
    double a = 0.0;
    double lambda_c_a = 0.0;
    double C_a = 0.0;              // right slope of F(., a) at lambda_c(a)
    double small_a_prediction = 0.0;  // sqrt(8 c3) a
    bool has_saturation = false;   // lambda_- (and/or lambda_+) finite
    bool symmetric_case = false;   // lambda_- == lambda_+
    // Slopes of the excess free energy / critical-curve excess at lambda_-/+
    double f_excess_slope_minus = 0.0;
    double f_excess_slope_plus = 0.0;
    double ac_excess_slope_minus = 0.0;
    double ac_excess_slope_plus = 0.0;
};

struct PhaseDiagramRow {
    double lambda = 0.0;
    double flat_free_energy = 0.0;
    double a_c = 0.0;
};

class WellModel {
public:
    // Builds the renewal model from the lattice law (first-return DP to n_max).
    WellModel(const IncrementLaw& law, int n_max);
    // Shares an already-built renewal model.
    WellModel(std::shared_ptr<const RenewalModel> renewal);

    const RenewalModel& renewal() const { return *renewal_; }
    const RateFunction& rate_fn(Sign s) const {
        return s == Sign::plus ? rate_plus_ : rate_minus_;
    }
    double flat_free_energy(double lambda) const { return renewal_->free_energy(lambda); }

    ExtReal max_depth() const;                        // abar
    std::pair<ExtReal, ExtReal> saturation_points() const;  // (lambda_-, lambda_+)

    // Variational objective; -inf where a rate-function penalty is infinite.
    double g_value(double lambda, double a, double u, double v) const;
    double g_value_asym(double lambda, double a, double b, double u, double v) const;

    WellSolution solve(double lambda, double a) const;
    // Non-symmetric boundary depths (left a, right b).
    WellSolution solve_asym(double lambda, double a, double b) const;

    // Independent oracle: triangular-grid maximum of g plus a golden-section
    // coordinate refinement around the best grid point.
    double psi_brute_force(double lambda, double a, int grid_n) const;

    CriticalDepth critical_depth(double lambda) const;
    double lambda_c_of_depth(double a) const;  // +inf when a >= abar

    TransitionReport transition_constants(double a) const;

    std::vector<PhaseDiagramRow> phase_diagram(const std::vector<double>& lambda_grid) const;

private:
    // w I_s(a/w), with the limit value a*t0 at w = 0.
    double penalty(Sign s, double a, double w) const;
    WellSolution solve_impl(double lambda, double a, double b) const;
    ExtReal solve_saturation_point(const RateFunction& rf) const;

    std::shared_ptr<const RenewalModel> renewal_;
    RateFunction rate_plus_;
    RateFunction rate_minus_;
    ExtReal lambda_minus_, lambda_plus_;  // computed once at construction
};

}  // namespace wetting
