#include "wetting/oracles.hpp"

#include <cmath>

namespace wetting {

double polylog(double s, double z) {
    if (z < 0.0 || z > 1.0) throw std::invalid_argument("polylog: need 0 <= z <= 1");
    if (z == 0.0) return 0.0;
    if (z == 1.0) {
        if (s <= 1.0) return kInf;
        return std::riemann_zeta(s);
    }
    double theta = -std::log(z);
    const long long M = 200000;
    double acc = 0.0;
    double zn = 1.0;
    for (long long n = 1; n <= M; ++n) {
        zn *= z;
        double term = zn * std::pow(static_cast<double>(n), -s);
        acc += term;
        if (term < 1e-17 * acc && theta * static_cast<double>(n) > 1.0) return acc;
    }
    return acc + powerlaw_exp_tail(s, theta, static_cast<double>(M));
}

namespace {

// Coefficients of 1 - sqrt(1-x): c_1 = 1/2, c_{n+1} = c_n (2n-1)/(2n+2).
// These are also the inter-arrival probabilities of the Laplace SOS renewal.
std::vector<double> sqrt_series(int n_max) {
    std::vector<double> c(static_cast<std::size_t>(n_max + 1), 0.0);
    c[1] = 0.5;
    for (int n = 1; n < n_max; ++n)
        c[static_cast<std::size_t>(n + 1)] =
            c[static_cast<std::size_t>(n)] * (2.0 * n - 1.0) / (2.0 * n + 2.0);
    return c;
}

// f_n^+(0) of the nu=2 generalized Laplace SOS, from the generating function
// gamma (1 - sqrt(1 + sqrt(1-x)) / sqrt(2)) via a square-root-of-series
// recursion.
std::vector<double> glaplace_series(double gamma, int n_max) {
    std::vector<double> c = sqrt_series(n_max);
    std::vector<double> p(static_cast<std::size_t>(n_max + 1), 0.0);
    double p0 = std::sqrt(2.0);
    for (int n = 1; n <= n_max; ++n) {
        double conv = 0.0;
        for (int k = 1; k < n; ++k)
            conv += p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(n - k)];
        p[static_cast<std::size_t>(n)] = (-c[static_cast<std::size_t>(n)] - conv) / (2.0 * p0);
    }
    std::vector<double> f(static_cast<std::size_t>(n_max + 1), 0.0);
    for (int n = 1; n <= n_max; ++n)
        f[static_cast<std::size_t>(n)] = -gamma * p[static_cast<std::size_t>(n)] / std::sqrt(2.0);
    return f;
}

double stable_density_at_zero(double alpha) {
    if (alpha == 2.0) return 1.0 / std::sqrt(2.0 * M_PI);  // standard normal walk
    if (alpha == 1.0) return 1.0 / M_PI;                   // standard Cauchy walk
    return std::tgamma(1.0 + 1.0 / alpha) / M_PI;          // standard symmetric stable
}

}  // namespace

ClosedFormModel ClosedFormModel::lazy_rw(double gamma) {
    if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("lazy_rw: bad gamma");
    return ClosedFormModel(OracleFamily::LazyRW, gamma);
}

ClosedFormModel ClosedFormModel::geometric_sos(double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("geometric_sos: bad gamma");
    return ClosedFormModel(OracleFamily::GeometricSOS, gamma);
}

ClosedFormModel ClosedFormModel::laplace_sos(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("laplace_sos: bad gamma");
    return ClosedFormModel(OracleFamily::LaplaceSOS, gamma);
}

ClosedFormModel ClosedFormModel::gaussian_free_field() {
    ClosedFormModel m(OracleFamily::GaussianFreeField, 0.0);
    m.falpha0_ = stable_density_at_zero(2.0);
    m.zeta_s_ = 1.5;
    return m;
}

ClosedFormModel ClosedFormModel::generalized_laplace(double gamma) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("generalized_laplace: bad gamma");
    ClosedFormModel m(OracleFamily::GeneralizedLaplaceNu2, gamma);
    m.glaplace_coeffs_ =
        std::make_shared<std::vector<double>>(glaplace_series(gamma, 20000));
    return m;
}

ClosedFormModel ClosedFormModel::zeta_renewal(double alpha) {
    return zeta_renewal(alpha, stable_density_at_zero(alpha));
}

ClosedFormModel ClosedFormModel::zeta_renewal(double alpha, double f_alpha0) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("zeta_renewal: alpha in (0,2]");
    ClosedFormModel m(OracleFamily::ZetaRenewal, alpha);
    m.falpha0_ = f_alpha0;
    m.zeta_s_ = 1.0 + 1.0 / alpha;
    return m;
}

double ClosedFormModel::lambda_c() const {
    switch (family_) {
        case OracleFamily::LazyRW:
        case OracleFamily::GeometricSOS:
            return 1.0 / (1.0 - gamma_);
        case OracleFamily::LaplaceSOS:
            return 1.0 / gamma_;
        case OracleFamily::GaussianFreeField:
        case OracleFamily::ZetaRenewal:
            return 1.0 / (falpha0_ * std::riemann_zeta(zeta_s_));
        case OracleFamily::GeneralizedLaplaceNu2:
            return std::sqrt(2.0) / (gamma_ * (std::sqrt(2.0) - 1.0));
    }
    throw std::logic_error("unreachable");
}

double ClosedFormModel::free_energy(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("free_energy: lambda > 0");
    if (lambda <= lambda_c()) return 0.0;
    switch (family_) {
        case OracleFamily::LazyRW: {
            double g = gamma_;
            double A = lambda - 1.0;
            double B = -lambda * (lambda - 1.0) * (1.0 - 2.0 * g);
            double C = -lambda * lambda * g * g;
            double x = (-B + std::sqrt(B * B - 4.0 * A * C)) / (2.0 * A);
            return std::log(x);
        }
        case OracleFamily::GeometricSOS: {
            double g = gamma_;
            return std::log(lambda * (lambda - 1.0) * (1.0 - g) * (1.0 - g) /
                            (lambda * (1.0 - g * g) - 1.0));
        }
        case OracleFamily::LaplaceSOS: {
            double gl = gamma_ * lambda;
            return std::log(gl * gl / (2.0 * gl - 1.0));
        }
        case OracleFamily::GeneralizedLaplaceNu2: {
            double gl = gamma_ * lambda;
            return -std::log(4.0 * (gl - 1.0) * (gl - 1.0) * (2.0 * gl - 1.0) /
                             (gl * gl * gl * gl));
        }
        case OracleFamily::GaussianFreeField:
        case OracleFamily::ZetaRenewal: {
            // Li_s(e^{-F}) = 1 / (f_alpha(0) lambda)
            double target = 1.0 / (falpha0_ * lambda);
            double hi = 1.0;
            while (polylog(zeta_s_, std::exp(-hi)) > target) hi *= 2.0;
            auto g = [&](double th) { return target - polylog(zeta_s_, std::exp(-th)); };
            auto gp = [&](double th) { return polylog(zeta_s_ - 1.0, std::exp(-th)); };
            return newton_bracketed(g, gp, 0.0, hi, 1e-15 * target, 1e-13);
        }
    }
    throw std::logic_error("unreachable");
}

double ClosedFormModel::free_energy_deriv(double lambda) const {
    double h = 1e-6 * lambda;
    return (free_energy(lambda + h) - free_energy(lambda - h)) / (2.0 * h);
}

bool ClosedFormModel::has_walk_form() const {
    return family_ != OracleFamily::ZetaRenewal || gamma_ == 2.0;
}

double ClosedFormModel::log_mgf(double t) const {
    switch (family_) {
        case OracleFamily::LazyRW:
            return std::log1p(2.0 * gamma_ * (std::cosh(t) - 1.0));
        case OracleFamily::GeometricSOS: {
            double beta = 2.0 * gamma_ / ((1.0 - gamma_) * (1.0 - gamma_));
            double d = 1.0 - beta * (std::cosh(t) - 1.0);
            return d > 0.0 ? -std::log(d) : kInf;
        }
        case OracleFamily::LaplaceSOS: {
            double r = t / gamma_;
            return std::abs(r) < 1.0 ? -std::log1p(-r * r) : kInf;
        }
        case OracleFamily::GeneralizedLaplaceNu2: {
            double r = t / gamma_;
            return std::abs(r) < 1.0 ? -2.0 * std::log1p(-r * r) : kInf;
        }
        case OracleFamily::GaussianFreeField:
            return 0.5 * t * t;
        case OracleFamily::ZetaRenewal:
            if (gamma_ == 2.0) return 0.5 * t * t;
            throw std::invalid_argument("log_mgf: no walk-level form for this kernel");
    }
    throw std::logic_error("unreachable");
}

double ClosedFormModel::log_mgf_inverse(double y) const {
    if (y < 0.0) throw std::invalid_argument("log_mgf_inverse: y >= 0");
    switch (family_) {
        case OracleFamily::LazyRW:
            return std::acosh(1.0 + (std::exp(y) - 1.0) / (2.0 * gamma_));
        case OracleFamily::GeometricSOS: {
            double g = gamma_;
            return std::acosh(1.0 + (1.0 - g) * (1.0 - g) / (2.0 * g) * (1.0 - std::exp(-y)));
        }
        case OracleFamily::LaplaceSOS:
            return gamma_ * std::sqrt(1.0 - std::exp(-y));
        case OracleFamily::GeneralizedLaplaceNu2:
            return gamma_ * std::sqrt(1.0 - std::exp(-0.5 * y));
        case OracleFamily::GaussianFreeField:
            return std::sqrt(2.0 * y);
        case OracleFamily::ZetaRenewal:
            if (gamma_ == 2.0) return std::sqrt(2.0 * y);
            throw std::invalid_argument("log_mgf_inverse: no walk-level form");
    }
    throw std::logic_error("unreachable");
}

double ClosedFormModel::well_free_energy(double lambda, double a) const {
    if (!has_well_formula())
        throw std::invalid_argument("well_free_energy: family has no well formula");
    double F = free_energy(lambda);
    if (F <= 0.0) return 0.0;
    return std::max(F - 2.0 * a * log_mgf_inverse(F), 0.0);
}

double ClosedFormModel::critical_depth(double lambda) const {
    if (!has_well_formula())
        throw std::invalid_argument("critical_depth: family has no well formula");
    double F = free_energy(lambda);
    if (F <= 0.0) return 0.0;
    return F / (2.0 * log_mgf_inverse(F));
}

bool ClosedFormModel::has_laplace_form() const {
    return family_ == OracleFamily::LaplaceSOS || family_ == OracleFamily::GaussianFreeField ||
           family_ == OracleFamily::GeneralizedLaplaceNu2 ||
           family_ == OracleFamily::ZetaRenewal;
}

double ClosedFormModel::phi(double theta) const {
    switch (family_) {
        case OracleFamily::LaplaceSOS:
            return gamma_ * (1.0 - std::sqrt(1.0 - std::exp(-theta)));
        case OracleFamily::GeneralizedLaplaceNu2:
            return gamma_ * (1.0 - std::sqrt(1.0 + std::sqrt(1.0 - std::exp(-theta))) /
                                       std::sqrt(2.0));
        case OracleFamily::GaussianFreeField:
        case OracleFamily::ZetaRenewal:
            return falpha0_ * polylog(zeta_s_, std::exp(-theta));
        default:
            throw std::invalid_argument("phi: no closed Laplace transform");
    }
}

bool ClosedFormModel::has_kernel() const { return has_laplace_form(); }

KernelSpec ClosedFormModel::renewal_kernel() const {
    KernelSpec spec;
    switch (family_) {
        case OracleFamily::LaplaceSOS: {
            double g = gamma_;
            // f_n^+(0) = gamma K(n), K(n) = binom(2n,n)/((2n-1) 4^n)
            spec.name = "laplace-sos";
            spec.fplus0 = [g](int n) {
                double K = 0.5;
                for (int k = 1; k < n; ++k) K *= (2.0 * k - 1.0) / (2.0 * k + 2.0);
                return g * K;
            };
            spec.phi_exact = [g](double th) {
                return g * (1.0 - std::sqrt(1.0 - std::exp(-th)));
            };
            spec.tail_index = 1.5;
            break;
        }
        case OracleFamily::GeneralizedLaplaceNu2: {
            auto coeffs = glaplace_coeffs_;
            double g = gamma_;
            spec.name = "glaplace-nu2";
            spec.fplus0 = [coeffs](int n) {
                if (n >= static_cast<int>(coeffs->size()))
                    throw std::out_of_range("glaplace kernel: n beyond the series table");
                return (*coeffs)[static_cast<std::size_t>(n)];
            };
            spec.phi_exact = [g](double th) {
                return g * (1.0 -
                            std::sqrt(1.0 + std::sqrt(1.0 - std::exp(-th))) / std::sqrt(2.0));
            };
            spec.tail_index = 1.5;
            break;
        }
        case OracleFamily::GaussianFreeField:
        case OracleFamily::ZetaRenewal: {
            double f0 = falpha0_, s = zeta_s_;
            spec.name = "zeta-renewal";
            spec.fplus0 = [f0, s](int n) { return f0 * std::pow(n, -s); };
            spec.phi_exact = [f0, s](double th) { return f0 * polylog(s, std::exp(-th)); };
            spec.tail_index = s;
            break;
        }
        default:
            throw std::invalid_argument("renewal_kernel: lattice family, use from_law");
    }
    return spec;
}

}  // namespace wetting
