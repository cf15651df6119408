#include "wetting/numerics.hpp"

#include <algorithm>
#include <cstdlib>

namespace wetting {

namespace {

// int_M^inf x^{-s} e^{-theta x} dx, theta > 0. Half-integer exponents (the
// alpha = 2 kernels) reduce to erfc; anything else goes through an adaptive
// Simpson rule on the effectively finite support of the integrand.
double power_exp_integral(double s, double theta, double M) {
    const double rt = std::sqrt(theta * M);
    const double sqpi = std::sqrt(M_PI);
    if (s == 0.5) {
        // int x^{-1/2} e^{-theta x} = sqrt(pi/theta) erfc(sqrt(theta M))
        return std::sqrt(M_PI / theta) * std::erfc(rt);
    }
    if (s == 1.5) {
        // by parts: 2 M^{-1/2} e^{-theta M} - 2 theta int x^{-1/2} e^{-theta x}
        return 2.0 / std::sqrt(M) * std::exp(-theta * M) -
               2.0 * std::sqrt(M_PI * theta) * std::erfc(rt);
    }
    if (s == 2.5) {
        double i32 = power_exp_integral(1.5, theta, M);
        return (2.0 / 3.0) * (std::exp(-theta * M) / (M * std::sqrt(M)) - theta * i32);
    }
    if (s == -0.5) {
        // int x^{1/2} e^{-theta x} = Gamma(3/2, theta M) / theta^{3/2}
        double g = 0.5 * sqpi * std::erfc(rt) + rt * std::exp(-theta * M);
        return g / (theta * std::sqrt(theta));
    }
    // generic exponent: theta^{s-1} Gamma(1-s, theta M)
    return std::pow(theta, s - 1.0) * upper_gamma(1.0 - s, theta * M);
}

}  // namespace

double powerlaw_tail(double s, double M) {
    if (s <= 1.0) throw std::invalid_argument("powerlaw_tail: needs s > 1");
    // Euler-Maclaurin: sum_{n>M} n^{-s} = M^{1-s}/(s-1) + M^{-s}/2 + s M^{-s-1}/12 - ...
    double t = std::pow(M, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(M, -s) +
               (s / 12.0) * std::pow(M, -s - 1.0);
    return t;
}

double powerlaw_exp_tail(double s, double theta, double M) {
    if (theta <= 0.0) return powerlaw_tail(s, M);
    // Midpoint rule: sum_{n=M+1}^inf g(n) ~ int_{M+1/2}^inf g(x) dx with
    // correction  +(1/24) g'(M+1/2)  (from the g'' midpoint error summed up).
    const double a = M + 0.5;
    double integral = power_exp_integral(s, theta, a);
    double ga = std::pow(a, -s) * std::exp(-theta * a);
    double gprime = -(s / a + theta) * ga;
    return integral + gprime / 24.0;
}

// ---------------------------------------------------------------------------
// Regularized incomplete gamma, series + Lentz continued fraction
// ---------------------------------------------------------------------------

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double upper_gamma(double a, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("upper_gamma: x > 0");
    // shift a into the positive range, then step back down through
    // Gamma(a-1, x) = (Gamma(a, x) - x^{a-1} e^{-x}) / (a - 1)
    int shifts = 0;
    double ab = a;
    while (ab <= 0.0) { ab += 1.0; ++shifts; }
    double G = gamma_q(ab, x) * std::tgamma(ab);
    for (int i = 0; i < shifts; ++i) {
        ab -= 1.0;
        G = (G - std::pow(x, ab) * std::exp(-x)) / ab;
    }
    return G;
}

double chi2_pvalue(double statistic, int dof) {
    return gamma_q(0.5 * dof, 0.5 * statistic);
}

// ---------------------------------------------------------------------------
// Thread pool-lite
// ---------------------------------------------------------------------------

int default_thread_count() {
    if (const char* env = std::getenv("WETTING_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
    if (threads <= 0) threads = default_thread_count();
    threads = std::min<std::size_t>(threads, n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace wetting
