#pragma once

// Small numerical toolbox shared across the library: extended reals used for
// branch logic, scalar root finding, stable log-sum accumulation, tail sums
// for power-law series, and a counter-based RNG.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wetting {

enum class Sign { plus, minus };

inline Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }

// ---------------------------------------------------------------------------
// Extended reals
// ---------------------------------------------------------------------------

// Tagged value in [0, +inf].  Branch decisions (saturation cases, support
// bounds, radii of convergence) compare these exactly instead of relying on
// float sentinels.
class ExtReal {
public:
    ExtReal() : v_(0.0), inf_(false) {}
    explicit ExtReal(double v) : v_(v), inf_(false) {
        if (std::isinf(v)) { inf_ = true; v_ = 0.0; }
    }
    static ExtReal infinity() { ExtReal x; x.inf_ = true; return x; }

    bool is_inf() const { return inf_; }
    bool is_finite() const { return !inf_; }
    double value() const {
        if (inf_) throw std::logic_error("ExtReal: value() on +inf");
        return v_;
    }
    // Collapse to IEEE double (+inf allowed) for arithmetic that tolerates it.
    double as_double() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

    friend bool operator==(const ExtReal& a, const ExtReal& b) {
        if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
        return a.v_ == b.v_;
    }
    friend bool operator<(const ExtReal& a, const ExtReal& b) {
        if (a.inf_) return false;
        if (b.inf_) return true;
        return a.v_ < b.v_;
    }
    friend bool operator<=(const ExtReal& a, const ExtReal& b) { return a < b || a == b; }
    friend bool operator>(const ExtReal& a, const ExtReal& b) { return b < a; }
    friend bool operator>=(const ExtReal& a, const ExtReal& b) { return b <= a; }

    friend bool operator<(const ExtReal& a, double b) { return !a.inf_ && a.v_ < b; }
    friend bool operator>(const ExtReal& a, double b) { return a.inf_ || a.v_ > b; }
    friend bool operator<=(const ExtReal& a, double b) { return !a.inf_ && a.v_ <= b; }
    friend bool operator>=(const ExtReal& a, double b) { return a.inf_ || a.v_ >= b; }

    friend ExtReal operator+(const ExtReal& a, const ExtReal& b) {
        if (a.inf_ || b.inf_) return infinity();
        return ExtReal(a.v_ + b.v_);
    }
    friend ExtReal operator*(double c, const ExtReal& a) {
        if (a.inf_) return c == 0.0 ? ExtReal(0.0) : infinity();
        return ExtReal(c * a.v_);
    }

private:
    double v_;
    bool inf_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Stable log-space accumulation
// ---------------------------------------------------------------------------

inline double log_sum_exp(const std::vector<double>& xs) {
    double m = -kInf;
    for (double x : xs) m = std::max(m, x);
    if (std::isinf(m)) return m;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// Streaming variant: accumulate max first, then a second pass is not possible;
// kept as a two-slot accumulator (running max + rescaled sum).
class LogAccumulator {
public:
    void add(double logx) {
        if (std::isinf(logx) && logx < 0) return;
        if (logx <= max_) {
            sum_ += std::exp(logx - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - logx) + 1.0;
            max_ = logx;
        }
    }
    double log_total() const {
        if (sum_ == 0.0) return -kInf;
        return max_ + std::log(sum_);
    }

private:
    double max_ = -kInf;
    double sum_ = 0.0;
};

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

// Bisection on a function with known sign change over [lo, hi].
// Runs to an absolute x-tolerance, with a residual-based early exit.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double flo, double fhi, double xtol, int max_iter = 200) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw std::invalid_argument("bisect: no sign change over bracket");
    for (int i = 0; i < max_iter && hi - lo > xtol; ++i) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
        else { hi = mid; fhi = fm; }
    }
    return 0.5 * (lo + hi);
}

// Newton iteration safeguarded by a maintained bracket; falls back to
// bisection whenever the Newton step leaves the bracket or stalls.
// Solves f(x)=0 for increasing f with f(lo)<0<f(hi).
inline double newton_bracketed(const std::function<double(double)>& f,
                               const std::function<double(double)>& fprime,
                               double lo, double hi, double ftol, double xtol,
                               int max_iter = 200) {
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < max_iter; ++i) {
        double fx = f(x);
        if (std::abs(fx) <= ftol) return x;
        if (fx > 0) hi = x; else lo = x;
        if (hi - lo <= xtol) return 0.5 * (lo + hi);
        double d = fprime(x);
        double xn = (d > 0) ? x - fx / d : lo - 1.0;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

// Golden-section maximization of a unimodal function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double xtol, int max_iter = 200) {
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Tail sums for power-law kernels
// ---------------------------------------------------------------------------

// sum_{n > M} n^{-s} e^{-theta n} for s in {1/2, 3/2, 5/2} and theta >= 0,
// via the midpoint (Euler-Maclaurin) approximation
//   sum_{n>M} g(n) = int_{M+1/2}^inf g(x) dx + g''-correction,
// with the integral in closed form through erfc.  Accurate to ~1e-12 relative
// for M >= 100, which is far below the truncation budgets it feeds into.
double powerlaw_exp_tail(double s, double theta, double M);

// sum_{n > M} n^{-s} (theta = 0 specialization; requires s > 1).
double powerlaw_tail(double s, double M);

// ---------------------------------------------------------------------------
// chi^2 upper tail (for sampler goodness-of-fit tests)
// ---------------------------------------------------------------------------

// Regularized upper incomplete gamma Q(a, x); chi^2 p-value = Q(k/2, x/2).
double gamma_q(double a, double x);
double chi2_pvalue(double statistic, int dof);

// Unnormalized upper incomplete gamma Gamma(a, x) for x > 0 and any real a
// (negative orders through the downward recurrence).
double upper_gamma(double a, double x);

// ---------------------------------------------------------------------------
// Deterministic RNG
// ---------------------------------------------------------------------------

// Counter-based splitmix64 stream.  Stream splitting: the (seed, stream) pair
// is hashed into an independent starting state, so parallel samplers use
// Rng(seed, path_index) and the output is independent of thread scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        state_ = mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0,1) with 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Inverse-CDF draw over a cumulative table (strictly increasing, last
    // entry = total mass); returns the first index with cdf[i] > u * total.
    std::size_t draw_index(const std::vector<double>& cdf) {
        double u = next_double() * cdf.back();
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] > u) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Deterministic parallel map over an index range
// ---------------------------------------------------------------------------

int default_thread_count();  // reads WETTING_THREADS, falls back to hw threads

// Applies fn(i) for i in [0, n); results must be written by index so that the
// outcome is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace wetting
