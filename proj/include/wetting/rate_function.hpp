#pragma once

// Fenchel-Legendre rate functions I_{+/-} of the walk, their derivatives and
// the left-continuous inverse of Lambda, with the four-way saturation case
// analysis (t0 and rho finite or not) resolved exactly on tagged values.

#include <utility>
#include <vector>

#include "wetting/increment_law.hpp"
#include "wetting/numerics.hpp"

namespace wetting {

enum class LdpCase {
    Trivial,                  // t0 = 0: I identically 0
    StrictlyConvexEverywhere, // rho = inf: strictly convex on [0, inf)
    AffineBeyondRho,          // t0 < inf, rho < inf: affine branch past rho
    SupportCutoff,            // t0 = inf, rho = xbar < inf: +inf past xbar
};

class RateFunction {
public:
    RateFunction(IncrementLaw law, Sign sign);

    Sign sign() const { return sign_; }
    const IncrementLaw& law() const { return law_; }
    const MgfProfile& mgf_profile() const { return profile_; }
    LdpCase case_tag() const { return case_; }

    ExtReal t0() const { return profile_.t0(sign_); }
    ExtReal rho() const { return profile_.rho(sign_); }
    ExtReal lambda_at_t0() const { return profile_.lambda_at_t0(sign_); }
    ExtReal xbar() const { return law_.xbar(sign_); }

    double lambda(double t) const { return law_.log_mgf(t, sign_); }
    double lambda_deriv(double t) const { return law_.log_mgf_deriv(t, sign_); }
    double lambda_deriv2(double t) const { return law_.log_mgf_deriv2(t, sign_); }

    // I(x) for x >= 0 (+inf past xbar).
    double rate(double x) const;

    // (I'(x), I''(x)); valid on (0, xbar], left-derivative at xbar.
    std::pair<double, double> derivatives(double x) const;

    // t_x = (Lambda')^{-1}(x) for x in (0, rho).
    double tilt_for_slope(double x) const;

    // Left-continuous inverse of Lambda: t0 for y >= Lambda(t0), 0 if t0 = 0.
    double lambda_inverse(double y) const;

    // Lambda' o Lambda^{-1}(y), the slope at free energy level y; +inf when
    // the inverse saturates at a t0 with infinite slope.
    double slope_at_level(double y) const;

private:
    IncrementLaw law_;
    Sign sign_;
    MgfProfile profile_;
    LdpCase case_;
};

// Exact-DP verification of the local large deviation behaviour and of the
// Chernov bound P(S_n >= xn) <= exp(-n I(x)).
struct LocalLdpRow {
    int n;
    double p_point;          // P(S_n = floor(xn))
    double empirical_rate;   // -(1/n) log P(S_n = floor(xn))
    double gap;              // empirical_rate - I(x)
    double p_upper;          // P(S_n >= xn)
    double chernov_bound;    // exp(-n I(x))
    bool chernov_ok;
};

struct LocalLdpReport {
    double x;
    double rate;
    std::vector<LocalLdpRow> rows;
    bool chernov_all_ok;
};

LocalLdpReport verify_local_ldp(const RateFunction& rf, double x,
                                const std::vector<int>& n_grid);

// Distribution of the free walk S_n as a dense table over a safely capped
// height window (lost mass is far below double precision at the cap used).
struct WalkDistribution {
    int offset;                 // value of the first cell
    std::vector<double> pmf;    // P(S_n = offset + i)
    double prob(int x) const {
        int i = x - offset;
        if (i < 0 || i >= static_cast<int>(pmf.size())) return 0.0;
        return pmf[static_cast<std::size_t>(i)];
    }
    double upper_tail(int x) const {  // P(S_n >= x)
        double s = 0.0;
        for (int v = std::max(x, offset); v < offset + static_cast<int>(pmf.size()); ++v)
            s += prob(v);
        return s;
    }
};

WalkDistribution free_walk_distribution(const IncrementLaw& law, int n);

}  // namespace wetting
