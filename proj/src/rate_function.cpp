#include "wetting/rate_function.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

RateFunction::RateFunction(IncrementLaw law, Sign sign)
    : law_(std::move(law)), sign_(sign), profile_(law_.profile()) {
    ExtReal t0v = profile_.t0(sign_);
    ExtReal rhov = profile_.rho(sign_);
    if (t0v == ExtReal(0.0)) {
        case_ = LdpCase::Trivial;
    } else if (rhov.is_inf()) {
        case_ = LdpCase::StrictlyConvexEverywhere;
    } else if (t0v.is_finite()) {
        case_ = LdpCase::AffineBeyondRho;
    } else {
        case_ = LdpCase::SupportCutoff;
    }
}

double RateFunction::tilt_for_slope(double x) const {
    if (!(x > 0.0)) return 0.0;
    ExtReal t0v = t0();
    // Expand an upper bracket toward t0 until Lambda'(hi) >= x.
    double lo = 0.0, hi;
    if (t0v.is_inf()) {
        hi = 1.0;
        while (lambda_deriv(hi) < x) {
            hi *= 2.0;
            if (hi > 1e8) throw std::invalid_argument("tilt_for_slope: x beyond rho");
        }
    } else {
        double t0d = t0v.value();
        double eps = 0.5 * t0d;
        hi = t0d - eps;
        while (lambda_deriv(hi) < x) {
            eps *= 0.25;
            hi = t0d - eps;
            if (eps < 1e-15 * t0d)
                throw std::invalid_argument("tilt_for_slope: x beyond rho");
        }
    }
    auto f = [&](double t) { return lambda_deriv(t) - x; };
    auto fp = [&](double t) { return lambda_deriv2(t); };
    double ftol = 1e-12 * std::max(1.0, std::abs(x));
    return newton_bracketed(f, fp, lo, hi, ftol, 1e-15 * std::max(1.0, hi));
}

double RateFunction::rate(double x) const {
    if (x < 0.0) throw std::invalid_argument("rate: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (case_ == LdpCase::Trivial) return 0.0;
    ExtReal xb = xbar();
    if (xb.is_finite() && x > xb.value()) return kInf;
    ExtReal rhov = rho();
    if (ExtReal(x) < rhov) {
        double tx = tilt_for_slope(x);
        return x * tx - lambda(tx);
    }
    if (case_ == LdpCase::AffineBeyondRho) {
        double t0d = t0().value();
        return x * t0d - lambda(t0d);
    }
    // SupportCutoff with x == xbar: single-path value -log pmf(xbar).
    double p = (sign_ == Sign::plus) ? law_.pmf(static_cast<int>(std::lround(x)))
                                     : law_.pmf(-static_cast<int>(std::lround(x)));
    if (p <= 0.0) return kInf;
    return -std::log(p);
}

std::pair<double, double> RateFunction::derivatives(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("rate_derivatives: need x > 0");
    if (case_ == LdpCase::Trivial) return {0.0, 0.0};
    ExtReal xb = xbar();
    if (xb.is_finite() && x > xb.value())
        throw std::invalid_argument("rate_derivatives: x beyond the support bound");
    ExtReal rhov = rho();
    if (ExtReal(x) < rhov) {
        double tx = tilt_for_slope(x);
        return {tx, 1.0 / lambda_deriv2(tx)};
    }
    // x >= rho: slope saturates at t0 (=+inf in the support-cutoff case),
    // curvature vanishes on the affine branch.
    return {t0().as_double(), 0.0};
}

double RateFunction::lambda_inverse(double y) const {
    if (y < 0.0) throw std::invalid_argument("lambda_inverse: y must be >= 0");
    if (y == 0.0) return 0.0;
    ExtReal t0v = t0();
    if (t0v == ExtReal(0.0)) return 0.0;
    ExtReal Lt0 = lambda_at_t0();
    if (Lt0.is_finite() && y >= Lt0.value()) return t0v.value();

    double lo = 0.0, hi;
    if (t0v.is_inf()) {
        hi = 1.0;
        while (lambda(hi) < y) hi *= 2.0;
    } else {
        double t0d = t0v.value();
        double eps = 0.5 * t0d;
        hi = t0d - eps;
        while (lambda(hi) < y) {
            eps *= 0.25;
            hi = t0d - eps;
            if (eps < 1e-16 * t0d) return t0d;
        }
    }
    auto f = [&](double t) { return lambda(t) - y; };
    auto fp = [&](double t) { return lambda_deriv(t); };
    double ftol = 1e-13 * std::max(1.0, y);
    return newton_bracketed(f, fp, lo, hi, ftol, 1e-15 * std::max(1.0, hi));
}

double RateFunction::slope_at_level(double y) const {
    ExtReal t0v = t0();
    if (t0v == ExtReal(0.0)) return kInf;  // convention Lambda' o Lambda^{-1} = +inf
    ExtReal Lt0 = lambda_at_t0();
    if (Lt0.is_finite() && y >= Lt0.value()) return rho().as_double();
    return lambda_deriv(lambda_inverse(y));
}

// ---------------------------------------------------------------------------
// Exact free-walk DP
// ---------------------------------------------------------------------------

WalkDistribution free_walk_distribution(const IncrementLaw& law, int n) {
    int smin = law.table_min(), smax = law.table_max();
    double sigma = std::sqrt(law.variance());
    int spread = static_cast<int>(std::ceil(12.0 * sigma * std::sqrt(static_cast<double>(n)))) +
                 std::max(smax, -smin);
    int lo = std::max(n * smin, -spread);
    int hi = std::min(n * smax, spread);

    WalkDistribution dist;
    dist.offset = lo;
    dist.pmf.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    std::vector<double> cur(dist.pmf.size(), 0.0), next(dist.pmf.size(), 0.0);
    cur[static_cast<std::size_t>(-lo)] = 1.0;
    for (int step = 0; step < n; ++step) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = lo; x <= hi; ++x) {
            double m = cur[static_cast<std::size_t>(x - lo)];
            if (m == 0.0) continue;
            for (int dx = smin; dx <= smax; ++dx) {
                double p = law.pmf(dx);
                if (p == 0.0) continue;
                int y = x + dx;
                if (y < lo || y > hi) continue;  // lost mass << 1e-18
                next[static_cast<std::size_t>(y - lo)] += m * p;
            }
        }
        std::swap(cur, next);
    }
    dist.pmf = cur;
    return dist;
}

LocalLdpReport verify_local_ldp(const RateFunction& rf, double x,
                                const std::vector<int>& n_grid) {
    LocalLdpReport rep;
    rep.x = x;
    rep.rate = rf.rate(x);
    rep.chernov_all_ok = true;
    double sg = (rf.sign() == Sign::plus) ? 1.0 : -1.0;
    for (int n : n_grid) {
        WalkDistribution d = free_walk_distribution(rf.law(), n);
        int target = static_cast<int>(std::floor(x * n));
        LocalLdpRow row;
        row.n = n;
        row.p_point = d.prob(static_cast<int>(sg) * target);
        row.empirical_rate = row.p_point > 0.0 ? -std::log(row.p_point) / n : kInf;
        row.gap = row.empirical_rate - rep.rate;
        if (rf.sign() == Sign::plus) {
            row.p_upper = d.upper_tail(static_cast<int>(std::ceil(x * n)));
        } else {
            double s = 0.0;
            int thr = -static_cast<int>(std::ceil(x * n));
            for (int v = d.offset; v <= thr; ++v) s += d.prob(v);
            row.p_upper = s;
        }
        row.chernov_bound = std::exp(-n * rep.rate);
        row.chernov_ok = row.p_upper <= row.chernov_bound * (1.0 + 1e-12);
        rep.chernov_all_ok = rep.chernov_all_ok && row.chernov_ok;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace wetting
