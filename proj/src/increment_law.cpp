#include "wetting/increment_law.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wetting {

namespace {

constexpr double kTailTarget = 1e-14;   // two-sided table truncation budget
constexpr double kSeriesRel = 1e-18;    // series term cutoff, relative

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, m, fa, flm, fm);
    double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 60);
}

double zeta(double s) { return std::riemann_zeta(s); }

// sum_{x >= 1} x^m (1+x)^{-theta} e^{-delta x}  for m in {0,1,2}, delta >= 0.
// delta = 0 reduces to zeta differences; small delta uses a direct head plus
// a midpoint-rule tail so the cost stays bounded as delta -> 0.
double ag_decaying_sum(int m, double theta, double delta) {
    if (delta < 0.0) return kInf;
    if (delta == 0.0) {
        // sum x^m (1+x)^{-theta} = sum_{y>=2} (y-1)^m y^{-theta}
        if (theta - m <= 1.0) return kInf;
        switch (m) {
            case 0: return zeta(theta) - 1.0;
            case 1: return zeta(theta - 1.0) - zeta(theta);
            case 2: return zeta(theta - 2.0) - 2.0 * zeta(theta - 1.0) + zeta(theta);
        }
        throw std::invalid_argument("ag_decaying_sum: m out of range");
    }
    const long long head_cap = 200000;
    double acc = 0.0;
    long long x = 1;
    for (; x <= head_cap; ++x) {
        double term = std::pow(static_cast<double>(x), m) *
                      std::pow(1.0 + static_cast<double>(x), -theta) *
                      std::exp(-delta * static_cast<double>(x));
        acc += term;
        if (term < kSeriesRel * acc && delta * static_cast<double>(x) > 1.0) return acc;
    }
    // Tail past the head: midpoint integral + first Euler-Maclaurin correction.
    auto f = [m, theta, delta](double u) {
        return std::pow(u, m) * std::pow(1.0 + u, -theta) * std::exp(-delta * u);
    };
    double a = static_cast<double>(head_cap) + 0.5;
    double b = a + 60.0 / delta;
    double tail = integrate(f, a, b, 1e-14 * std::max(acc, f(a) / delta));
    double fp = f(a) * (m / a - theta / (1.0 + a) - delta);
    return acc + tail + fp / 24.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

IncrementLaw IncrementLaw::lazy(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5))
        throw std::invalid_argument("lazy law: need 0 < gamma < 1/2");
    IncrementLaw law;
    law.family_ = Family::Lazy;
    law.param_ = gamma;
    law.pmf_ = {gamma, 1.0 - 2.0 * gamma, gamma};
    law.min_ = -1;
    law.max_ = 1;
    law.k_max_ = 1;
    law.tail_mass_bound_ = 0.0;
    law.xbar_plus_ = ExtReal(1.0);
    law.xbar_minus_ = ExtReal(1.0);
    return law;
}

IncrementLaw IncrementLaw::geometric(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("geometric law: need 0 < gamma < 1");
    IncrementLaw law;
    law.family_ = Family::Geometric;
    law.param_ = gamma;
    law.xbar_plus_ = ExtReal::infinity();
    law.xbar_minus_ = ExtReal::infinity();
    law.build_table(kTailTarget);
    return law;
}

IncrementLaw IncrementLaw::almost_geometric(double theta) {
    IncrementLaw law;
    law.family_ = Family::AlmostGeometric;
    law.param_ = theta;
    law.xbar_plus_ = ExtReal::infinity();
    law.xbar_minus_ = ExtReal::infinity();
    law.build_table(kTailTarget);
    return law;
}

IncrementLaw IncrementLaw::custom(const std::vector<std::pair<int, double>>& table) {
    if (table.empty()) throw std::invalid_argument("custom law: empty table");
    int lo = table[0].first, hi = table[0].first;
    for (auto& [x, p] : table) {
        if (p < 0.0) throw std::invalid_argument("custom law: negative probability");
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    IncrementLaw law;
    law.family_ = Family::Custom;
    law.min_ = lo;
    law.max_ = hi;
    law.pmf_.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (auto& [x, p] : table) law.pmf_[static_cast<std::size_t>(x - lo)] += p;

    double total = std::accumulate(law.pmf_.begin(), law.pmf_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("custom law: probabilities sum far from 1");
    for (double& p : law.pmf_) p /= total;

    double mean = 0.0;
    for (int x = lo; x <= hi; ++x) mean += x * law.pmf(x);
    if (std::abs(mean) > 1e-12)
        throw std::invalid_argument("custom law: mean is not zero");

    // Aperiodicity: the support differences must generate Z.
    int g = 0;
    for (int x = lo; x <= hi; ++x)
        if (law.pmf(x) > 0.0) g = std::gcd(g, x - lo);
    bool has_two = false;
    int npos = 0;
    for (int x = lo; x <= hi; ++x)
        if (law.pmf(x) > 0.0) ++npos;
    has_two = npos >= 2;
    if (!has_two || g != 1)
        throw std::invalid_argument("custom law: walk is periodic or degenerate");

    law.k_max_ = std::max(hi, -lo);
    law.tail_mass_bound_ = 0.0;
    law.xbar_plus_ = ExtReal(static_cast<double>(hi));
    law.xbar_minus_ = ExtReal(static_cast<double>(-lo));
    return law;
}

void IncrementLaw::build_table(double tail_target) {
    if (family_ == Family::Geometric) {
        double g = param_;
        double c = (1.0 - g) / (1.0 + g);
        int K = 1;
        while (2.0 * c * std::pow(g, K + 1) / (1.0 - g) > tail_target) ++K;
        min_ = -K;
        max_ = K;
        k_max_ = K;
        tail_mass_bound_ = 2.0 * c * std::pow(g, K + 1) / (1.0 - g);
        pmf_.resize(static_cast<std::size_t>(2 * K + 1));
        for (int x = -K; x <= K; ++x)
            pmf_[static_cast<std::size_t>(x + K)] = c * std::pow(g, std::abs(x));
    } else {  // AlmostGeometric
        double th = param_;
        double norm = 1.0 + 2.0 * ag_decaying_sum(0, th, 1.0);
        double c = 1.0 / norm;
        auto w = [th](int x) {
            return std::pow(1.0 + std::abs(x), -th) * std::exp(-std::abs(x));
        };
        int K = 1;
        auto tail_bound = [&](int k) {
            // sum_{x>k} (1+x)^{-theta} e^{-x} <= (2+k)^{-theta} e^{-(k+1)} / (1-1/e)
            // (valid for theta >= 0; for theta < 0 bound the polynomial by its
            //  value against half the exponential decay)
            if (th >= 0.0)
                return 2.0 * c * std::pow(2.0 + k, -th) * std::exp(-(k + 1.0)) /
                       (1.0 - std::exp(-1.0));
            return 2.0 * c * std::pow(2.0 + k, -th) * std::exp(-0.5 * (k + 1.0)) /
                   (1.0 - std::exp(-0.5));
        };
        while (tail_bound(K) > tail_target) ++K;
        min_ = -K;
        max_ = K;
        k_max_ = K;
        tail_mass_bound_ = tail_bound(K);
        pmf_.resize(static_cast<std::size_t>(2 * K + 1));
        for (int x = -K; x <= K; ++x) pmf_[static_cast<std::size_t>(x + K)] = c * w(x);
    }
    double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
    for (double& p : pmf_) p /= total;
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

double IncrementLaw::mean() const {
    double m = 0.0;
    for (int x = min_; x <= max_; ++x) m += x * pmf(x);
    return m;
}

double IncrementLaw::variance() const { return log_mgf_deriv2(0.0, Sign::plus); }

// ---------------------------------------------------------------------------
// Log-MGF: closed forms per family
// ---------------------------------------------------------------------------

double IncrementLaw::log_mgf(double t, Sign s) const {
    if (t < 0.0) throw std::invalid_argument("log_mgf: t must be >= 0");
    switch (family_) {
        case Family::Lazy: {
            double g = param_;
            return std::log1p(2.0 * g * (std::cosh(t) - 1.0));
        }
        case Family::Geometric: {
            double g = param_;
            double beta = 2.0 * g / ((1.0 - g) * (1.0 - g));
            double d = 1.0 - beta * (std::cosh(t) - 1.0);
            if (d <= 0.0) return kInf;
            return -std::log(d);
        }
        case Family::AlmostGeometric: {
            if (t > 1.0) return kInf;
            double th = param_;
            double up = ag_decaying_sum(0, th, 1.0 - t);
            if (std::isinf(up)) return kInf;
            double down = ag_decaying_sum(0, th, 1.0 + t);
            double norm = 1.0 + 2.0 * ag_decaying_sum(0, th, 1.0);
            return std::log((1.0 + up + down) / norm);
        }
        case Family::Custom: {
            double sg = (s == Sign::plus) ? 1.0 : -1.0;
            double m = -kInf;
            for (int x = min_; x <= max_; ++x)
                if (pmf(x) > 0.0) m = std::max(m, sg * t * x);
            double acc = 0.0;
            for (int x = min_; x <= max_; ++x)
                if (pmf(x) > 0.0) acc += pmf(x) * std::exp(sg * t * x - m);
            return m + std::log(acc);
        }
    }
    throw std::logic_error("unreachable");
}

double IncrementLaw::log_mgf_deriv(double t, Sign s) const {
    switch (family_) {
        case Family::Lazy: {
            double g = param_;
            double d = 1.0 + 2.0 * g * (std::cosh(t) - 1.0);
            return 2.0 * g * std::sinh(t) / d;
        }
        case Family::Geometric: {
            double g = param_;
            double beta = 2.0 * g / ((1.0 - g) * (1.0 - g));
            double d = 1.0 - beta * (std::cosh(t) - 1.0);
            if (d <= 0.0) return kInf;
            return beta * std::sinh(t) / d;
        }
        case Family::AlmostGeometric: {
            if (t > 1.0) return kInf;
            double th = param_;
            double m0 = 1.0 + ag_decaying_sum(0, th, 1.0 - t) + ag_decaying_sum(0, th, 1.0 + t);
            double m1 = ag_decaying_sum(1, th, 1.0 - t) - ag_decaying_sum(1, th, 1.0 + t);
            return m1 / m0;  // +inf propagates if the upward series diverges
        }
        case Family::Custom: {
            double sg = (s == Sign::plus) ? 1.0 : -1.0;
            double m = -kInf;
            for (int x = min_; x <= max_; ++x)
                if (pmf(x) > 0.0) m = std::max(m, sg * t * x);
            double z = 0.0, z1 = 0.0;
            for (int x = min_; x <= max_; ++x) {
                if (pmf(x) <= 0.0) continue;
                double w = pmf(x) * std::exp(sg * t * x - m);
                z += w;
                z1 += sg * x * w;
            }
            return z1 / z;
        }
    }
    throw std::logic_error("unreachable");
}

double IncrementLaw::log_mgf_deriv2(double t, Sign s) const {
    switch (family_) {
        case Family::Lazy: {
            double g = param_;
            double d = 1.0 + 2.0 * g * (std::cosh(t) - 1.0);
            double n = 2.0 * g * std::sinh(t);
            return (2.0 * g * std::cosh(t) * d - n * n) / (d * d);
        }
        case Family::Geometric: {
            double g = param_;
            double beta = 2.0 * g / ((1.0 - g) * (1.0 - g));
            double d = 1.0 - beta * (std::cosh(t) - 1.0);
            if (d <= 0.0) return kInf;
            double n = beta * std::sinh(t);
            return (beta * std::cosh(t) * d + n * n) / (d * d);
        }
        case Family::AlmostGeometric: {
            if (t > 1.0) return kInf;
            double th = param_;
            double m0 = 1.0 + ag_decaying_sum(0, th, 1.0 - t) + ag_decaying_sum(0, th, 1.0 + t);
            double m1 = ag_decaying_sum(1, th, 1.0 - t) - ag_decaying_sum(1, th, 1.0 + t);
            double m2 = ag_decaying_sum(2, th, 1.0 - t) + ag_decaying_sum(2, th, 1.0 + t);
            double mu = m1 / m0;
            return m2 / m0 - mu * mu;
        }
        case Family::Custom: {
            double sg = (s == Sign::plus) ? 1.0 : -1.0;
            double m = -kInf;
            for (int x = min_; x <= max_; ++x)
                if (pmf(x) > 0.0) m = std::max(m, sg * t * x);
            double z = 0.0, z1 = 0.0, z2 = 0.0;
            for (int x = min_; x <= max_; ++x) {
                if (pmf(x) <= 0.0) continue;
                double w = pmf(x) * std::exp(sg * t * x - m);
                z += w;
                z1 += sg * x * w;
                z2 += static_cast<double>(x) * x * w;
            }
            double mu = z1 / z;
            return z2 / z - mu * mu;
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<double, double> IncrementLaw::log_mgf_from_table(double t, Sign s) const {
    double sg = (s == Sign::plus) ? 1.0 : -1.0;
    double m = -kInf;
    for (int x = min_; x <= max_; ++x)
        if (pmf(x) > 0.0) m = std::max(m, sg * t * x);
    double acc = 0.0;
    for (int x = min_; x <= max_; ++x)
        if (pmf(x) > 0.0) acc += pmf(x) * std::exp(sg * t * x - m);
    double val = m + std::log(acc);

    // Bound on the ignored tail of E[e^{tX}] beyond the truncation radius.
    double bound = 0.0;
    int K = k_max_;
    if (family_ == Family::Geometric) {
        double g = param_;
        double c = (1.0 - g) / (1.0 + g);
        double ru = g * std::exp(t), rd = g * std::exp(-t);
        bound += (ru < 1.0) ? c * std::pow(ru, K + 1) / (1.0 - ru) : kInf;
        bound += (rd < 1.0) ? c * std::pow(rd, K + 1) / (1.0 - rd) : 0.0;
    } else if (family_ == Family::AlmostGeometric) {
        double th = param_;
        double du = 1.0 - t, dd = 1.0 + t;
        double poly = std::pow(2.0 + K, -std::max(th, 0.0));
        bound += (du > 0.0) ? poly * std::exp(-du * (K + 1)) / (1.0 - std::exp(-du)) : kInf;
        bound += poly * std::exp(-dd * (K + 1)) / (1.0 - std::exp(-dd));
    }
    return {val, bound};
}

// ---------------------------------------------------------------------------
// Profile and tilting
// ---------------------------------------------------------------------------

MgfProfile IncrementLaw::profile() const {
    MgfProfile p;
    switch (family_) {
        case Family::Lazy:
            p.t0_plus = p.t0_minus = ExtReal::infinity();
            p.rho_plus = p.rho_minus = ExtReal(1.0);  // t0 = inf, xbar finite
            p.lambda_at_t0_plus = p.lambda_at_t0_minus = ExtReal::infinity();
            break;
        case Family::Geometric: {
            double t0 = std::log(1.0 / param_);
            p.t0_plus = p.t0_minus = ExtReal(t0);
            p.rho_plus = p.rho_minus = ExtReal::infinity();
            p.lambda_at_t0_plus = p.lambda_at_t0_minus = ExtReal::infinity();
            break;
        }
        case Family::AlmostGeometric: {
            double th = param_;
            p.t0_plus = p.t0_minus = ExtReal(1.0);
            double L1 = log_mgf(1.0, Sign::plus);
            p.lambda_at_t0_plus = p.lambda_at_t0_minus =
                std::isinf(L1) ? ExtReal::infinity() : ExtReal(L1);
            if (th > 2.0) {
                double rho = log_mgf_deriv(1.0, Sign::plus);
                p.rho_plus = p.rho_minus = ExtReal(rho);
            } else {
                p.rho_plus = p.rho_minus = ExtReal::infinity();
            }
            break;
        }
        case Family::Custom:
            p.t0_plus = p.t0_minus = ExtReal::infinity();
            p.rho_plus = xbar_plus_;
            p.rho_minus = xbar_minus_;
            p.lambda_at_t0_plus = p.lambda_at_t0_minus = ExtReal::infinity();
            break;
    }
    return p;
}

TiltedLaw IncrementLaw::tilt(double t) const {
    MgfProfile p = profile();
    if (t >= 0.0 ? !(ExtReal(t) < p.t0_plus) : !(ExtReal(-t) < p.t0_minus))
        throw std::invalid_argument("tilt: t beyond the radius of convergence");

    // Re-derive the truncation for the tilted weights so the table is accurate
    // at any admissible t (the base table's radius is tuned for t = 0).
    int lo, hi;
    std::function<double(int)> weight;
    switch (family_) {
        case Family::Lazy:
        case Family::Custom:
            lo = min_;
            hi = max_;
            weight = [this, t](int x) { return pmf(x) * std::exp(t * x); };
            break;
        case Family::Geometric: {
            double g = param_;
            double c = (1.0 - g) / (1.0 + g);
            auto radius = [g](double tt) {
                double r = g * std::exp(std::abs(tt));
                return static_cast<int>(std::ceil(std::log(1e-18) / std::log(r)));
            };
            int K = std::max(radius(t), radius(-t));
            lo = -K;
            hi = K;
            weight = [c, g, t](int x) {
                return c * std::pow(g, std::abs(x)) * std::exp(t * x);
            };
            break;
        }
        case Family::AlmostGeometric: {
            double th = param_;
            double norm = 1.0 + 2.0 * ag_decaying_sum(0, th, 1.0);
            double c = 1.0 / norm;
            auto radius = [th](double delta) {
                // (1+x)^{-theta} e^{-delta x} < 1e-18; for theta < 0 the
                // polynomial factor grows, so iterate the fixed point once
                double x = 45.0 / delta;
                if (th < 0.0)
                    for (int i = 0; i < 4; ++i) x = (45.0 - th * std::log1p(x)) / delta;
                return static_cast<long long>(std::min(4e6, std::ceil(std::max(10.0, x))));
            };
            long long K = std::max(radius(1.0 - t), radius(1.0 + t));
            lo = static_cast<int>(-K);
            hi = static_cast<int>(K);
            weight = [c, th, t](int x) {
                return c * std::pow(1.0 + std::abs(x), -th) *
                       std::exp(-std::abs(x) + t * x);
            };
            break;
        }
        default:
            throw std::logic_error("unreachable");
    }

    std::vector<double> w(static_cast<std::size_t>(hi - lo + 1));
    double total = 0.0;
    for (int x = lo; x <= hi; ++x) {
        double v = weight(x);
        w[static_cast<std::size_t>(x - lo)] = v;
        total += v;
    }
    double mean = 0.0, m2 = 0.0;
    for (int x = lo; x <= hi; ++x) {
        double q = w[static_cast<std::size_t>(x - lo)] / total;
        w[static_cast<std::size_t>(x - lo)] = q;
        mean += x * q;
        m2 += static_cast<double>(x) * x * q;
    }
    return TiltedLaw(std::move(w), lo, t, mean, m2 - mean * mean,
                     std::make_shared<IncrementLaw>(*this));
}

TiltedLaw TiltedLaw::tilt(double s) const { return base_->tilt(t_ + s); }

}  // namespace wetting
