#pragma once

// Closed-form integrable wetting models used as ground truth across the test
// suite. The lattice families (lazy / geometric) double the renewal solver;
// the renewal-only families (Laplace and generalized-Laplace SOS, stable-walk
// zeta kernels) plug their exact kernels into the renewal machinery.

#include <memory>
#include <vector>

#include "wetting/renewal.hpp"

namespace wetting {

// Li_s(z) = sum_{n>=1} z^n n^{-s}, 0 <= z <= 1 (z = 1 needs s > 1).
double polylog(double s, double z);

enum class OracleFamily {
    LazyRW,
    GeometricSOS,
    LaplaceSOS,
    GaussianFreeField,
    GeneralizedLaplaceNu2,
    ZetaRenewal,
};

class ClosedFormModel {
public:
    static ClosedFormModel lazy_rw(double gamma);
    static ClosedFormModel geometric_sos(double gamma);
    static ClosedFormModel laplace_sos(double gamma);
    static ClosedFormModel gaussian_free_field();
    static ClosedFormModel generalized_laplace(double gamma);  // nu = 2
    // alpha-stable renewal kernel; f_alpha(0) defaults to the standard
    // symmetric-stable density at 0 (1/sqrt(2 pi) for alpha = 2, 1/pi for
    // alpha = 1).
    static ClosedFormModel zeta_renewal(double alpha);
    static ClosedFormModel zeta_renewal(double alpha, double f_alpha0);

    OracleFamily family() const { return family_; }
    double param() const { return gamma_; }

    double lambda_c() const;
    double free_energy(double lambda) const;
    double free_energy_deriv(double lambda) const;

    // Lambda and its inverse where the family has a walk-level description.
    bool has_walk_form() const;
    double log_mgf(double t) const;
    double log_mgf_inverse(double y) const;

    // Elevated-boundary closed forms (all walk-level families).
    bool has_well_formula() const { return has_walk_form(); }
    double well_free_energy(double lambda, double a) const;
    double critical_depth(double lambda) const;

    // kappa * K(theta) = Phi(theta) where the Laplace transform is closed.
    bool has_laplace_form() const;
    double phi(double theta) const;

    // Exact renewal kernel for RenewalModel::from_kernel (renewal-only
    // families and the Laplace/g-Laplace SOS chains).
    bool has_kernel() const;
    KernelSpec renewal_kernel() const;

private:
    ClosedFormModel(OracleFamily f, double g) : family_(f), gamma_(g) {}

    OracleFamily family_;
    double gamma_ = 0.0;   // family parameter (gamma, or alpha for zeta)
    double falpha0_ = 0.0; // zeta kernels: stable density at 0
    double zeta_s_ = 0.0;  // zeta kernels: inter-arrival exponent 1 + 1/alpha
    std::shared_ptr<std::vector<double>> glaplace_coeffs_;  // f_n^+(0) series
};

}  // namespace wetting
