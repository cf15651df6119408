#pragma once

// Renewal reduction of the wetting model: first-return table f_n^+(0), kappa,
// the Laplace transform K, the free energy solver, the tilted renewal and the
// contact-number law.  Works either from a lattice increment law (first-return
// DP) or from a closed-form kernel plugged in by the oracle families.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wetting/increment_law.hpp"
#include "wetting/numerics.hpp"

namespace wetting {

// Closed-form renewal kernel: f_n^+(0) directly, optionally with the exact
// partial Laplace transform Phi(theta) = sum_n f_n^+(0) e^{-theta n}.
struct KernelSpec {
    std::string name;
    std::function<double(int)> fplus0;
    std::function<double(double)> phi_exact;  // may be empty
    double tail_index = 1.5;                  // f_n^+(0) ~ C n^{-tail_index}
};

struct TiltedRenewal {
    double lambda = 0.0;
    double F = 0.0;                // free energy at lambda
    std::vector<double> Ktilde;    // Ktilde[m], m = 1..m_support ([0] unused)
    double gap_mean = 0.0;         // m_lambda = E[tau_1] under the tilt
    double gap_var = 0.0;          // Var[tau_1]
    std::vector<double> mass;      // P(n in tau), n = 0..N_max

    int m_support() const { return static_cast<int>(Ktilde.size()) - 1; }
    // Variance of the Gaussian in the contact-number local limit theorem.
    double contact_sigma2() const { return gap_var / gap_mean; }
};

struct ContactNumberLaw {
    int N = 0;
    double lambda = 0.0;
    std::vector<double> pmf;       // P(H_N = k), k = 0..kmax
    std::vector<double> gaussian;  // (m_lambda/sqrt(N)) phi_sigma((N-k m)/sqrt(N))
    double gap_mean = 0.0;
    double mean() const {
        double m = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k) m += k * pmf[k];
        return m;
    }
};

// Banded table of g_n(k) = P(n in tau, |tau cap [1,n]| = k); rows normalized
// against P(n in tau) give the contact law of every length at once.
struct ContactTable {
    std::vector<int> kmin;                  // first k held in row n
    std::vector<std::vector<double>> rows;  // rows[n][k - kmin[n]]
    double value(int n, int k) const {
        int i = k - kmin[static_cast<std::size_t>(n)];
        const auto& r = rows[static_cast<std::size_t>(n)];
        if (i < 0 || i >= static_cast<int>(r.size())) return 0.0;
        return r[static_cast<std::size_t>(i)];
    }
};

struct CriticalRow {
    double u;
    double free_energy;
    double ratio;  // F/u^2 in the alpha=2 case, F/u in the transient case
};

struct CriticalAsymptoticsReport {
    bool transient = false;       // sum n f_n^+(0) < infinity
    double predicted = 0.0;       // c3 sigma^2, or the transient slope c1
    std::vector<CriticalRow> rows;
};

struct LadderReport {
    std::vector<double> height_pmf;  // P(ladder height = h), truncated DP
    double unabsorbed = 0.0;         // mass with first passage beyond the horizon
    double p_zero_corrected = 0.0;   // P(H=0) with the n^{-3/2} tail restored
};

class RenewalModel {
public:
    static RenewalModel from_law(const IncrementLaw& law, int n_max);
    static RenewalModel from_kernel(const KernelSpec& spec, int n_max);

    bool has_law() const { return law_.has_value(); }
    const IncrementLaw& law() const { return *law_; }
    int n_max() const { return n_max_; }

    double fplus0(int n) const { return fplus_[static_cast<std::size_t>(n)]; }
    double kappa() const { return kappa_; }
    double kappa_tail_bound() const { return tail_error_; }
    double lambda_c() const { return 1.0 / kappa_; }
    double ladder_positive_prob() const { return 1.0 - kappa_; }
    double c1_fitted() const { return c1_; }

    // Phi(theta) = sum_n f_n^+(0) e^{-theta n} = kappa K(theta), with the
    // power-law tail beyond n_max restored from the fitted asymptotics.
    double phi(double theta) const { return phi_moment(theta, 0); }
    // sum_n n^k f_n^+(0) e^{-theta n}, k = 0, 1, 2.
    double phi_moment(double theta, int k) const;
    double laplace_K(double theta) const { return phi(theta) / kappa_; }
    double laplace_K_error() const { return tail_error_ / kappa_; }

    // F(lambda): 0 below lambda_c = 1/kappa, else the root of K(F) = 1/(kappa lambda).
    double free_energy(double lambda) const;
    // Implicit differentiation of Phi(F) = 1/lambda: F'(lambda) = 1/(lambda m_lambda).
    double free_energy_deriv(double lambda) const;
    // Width of the certified bracket on F induced by the kernel tail error.
    double free_energy_error(double lambda) const;

    TiltedRenewal tilted_renewal(double lambda, int N_max) const;

    // log Z_{m,lambda} of the flat wetting model for m = 0..N.
    std::vector<double> log_flat_partition_table(double lambda, int N) const;
    double log_flat_partition(double lambda, int N) const;

    ContactNumberLaw contact_number_law(double lambda, int N) const;
    ContactTable contact_table(double lambda, int N) const;

    CriticalAsymptoticsReport critical_asymptotics(const std::vector<double>& u_grid) const;

    // Independent first-passage DP: distribution of the weak ladder height.
    LadderReport ladder_distribution() const;

private:
    RenewalModel() = default;
    void fit_tail();
    double solve_free_energy(double lambda) const;

    // memo for repeated lambda lookups in grid sweeps and brute-force scans
    struct Cache {
        std::mutex mutex;
        std::unordered_map<double, double> values;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();

    std::optional<IncrementLaw> law_;
    std::function<double(double)> phi_exact_;  // empty unless kernel-provided
    double tail_index_ = 1.5;
    int n_max_ = 0;
    std::vector<double> fplus_;  // fplus_[n], n = 1..n_max ([0] = 0)
    double kappa_ = 0.0;
    double c1_ = 0.0;            // fitted coefficient of n^{-tail_index}
    double d1_ = 0.0;            // fitted next-order coefficient
    double tail_error_ = 0.0;    // conservative bound on the tail correction
};

// First-return probabilities f_n^+(0) = P(S_1>0,...,S_{n-1}>0, S_n=0) for
// n = 1..n_max via a positivity-constrained forward sweep.
std::vector<double> first_return_table(const IncrementLaw& law, int n_max);

}  // namespace wetting
