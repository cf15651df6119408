#pragma once

// Exact finite-N solver for the well model: positivity-constrained Q tables,
// the no-contact/contact split of the partition function, joint laws of the
// left/right-most contact points and the contact count, and the prefactor
// study against the sharp asymptotics.

#include <vector>

#include "wetting/well.hpp"

namespace wetting {

// floor(aN) together with the fractional part, nudged so that values of a*N
// that are integers up to rounding land on the intended integer.
std::pair<int, double> floor_depth(double a, int N);

// log Q_{sign}(n, x_target) for n = 0..n_max, where
//   Q_+(n, x) = P(S_1>0,...,S_{n-1}>0, S_n = x),
//   Q_-(n, x) = P(S_1<0,...,S_{n-1}<0, S_n = -x).
struct QTable {
    int x_target = 0;
    Sign sign = Sign::plus;
    std::vector<double> log_q;
};
QTable q_table(const IncrementLaw& law, int x_target, int n_max, Sign sign);

// Z_{N,lambda}^a split into the no-contact part and the contact part, the
// latter assembled over (l, r) from the two Q tables and the flat partition
// function.  The flat factor weights the contacts strictly after l, so the
// contact at l itself carries one more factor of lambda (log_contact_weight).
struct WetDrySplit {
    int N = 0, A = 0;
    double lambda = 0.0, a = 0.0;
    double log_Z = -kInf;
    double log_Zbar = -kInf;    // no contact with the bottom
    double log_Zcheck = -kInf;  // at least one contact
    double log_contact_weight = 0.0;  // log(lambda) when A >= 1, else 0
    std::vector<double> log_Qminus;  // log Q_-(l, A), l = 0..N
    std::vector<double> log_Qplus;   // log Q_+(n, A), n = 0..N
    std::vector<double> log_Zflat;   // log Z_{m,lambda}, m = 0..N

    double log_Zcheck_lr(int l, int r) const {
        return log_contact_weight + log_Qminus[static_cast<std::size_t>(l)] +
               log_Zflat[static_cast<std::size_t>(r - l)] +
               log_Qplus[static_cast<std::size_t>(N - r)];
    }
};

WetDrySplit well_partition(const WellModel& model, double lambda, double a, int N);

// Independent oracle: one monolithic DP over (time, height) with the contact
// weight applied in place.
double log_well_partition_monolithic(const IncrementLaw& law, double lambda, double a,
                                     int N);

// Joint law of (L_N, R_N) plus the no-contact atom.
struct LrLaw {
    int N = 0, A = 0;
    double lambda = 0.0, a = 0.0;
    double dry_atom = 0.0;
    double mean_l = 0.0, mean_r = 0.0;  // conditional on a wet configuration
    double var_l = 0.0, var_r = 0.0, cov_lr = 0.0;
    WetDrySplit split;

    double prob(int l, int r) const {  // P(L = l, R = r)
        if (l < 0 || r < l || r > N) return 0.0;
        return std::exp(split.log_Zcheck_lr(l, r) - split.log_Z);
    }
};
LrLaw lr_joint_law(const WellModel& model, double lambda, double a, int N);

// Constants of the sharp asymptotics in the Cramer window.
struct GaussianConstants {
    double u_star = 0.0, v_star = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0, sigma3 = 0.0;
    double c0 = 0.0;        // I_-(a/u*) + I_+(a/(1-v*))
    double c1 = 0.0;        // prefactor limit of Z e^{-NF - c0 {aN}}
    double m_lambda = 0.0;
    double p_minus = 0.0, p_plus = 0.0;  // positivity constants of the ramps
};
GaussianConstants gaussian_constants(const WellModel& model, double lambda, double a);

// sup over the +-3 sigma sqrt(N) window of
// |2 pi N sigma1 sigma2 P(l,r) - gaussian kernel| (the kernel peaks at 1).
struct GaussianComparison {
    double sup_discrepancy = 0.0;
    double window_mass = 0.0;  // probability carried by the compared window
};
GaussianComparison compare_lr_gaussian(const LrLaw& law, const GaussianConstants& gc);

// Joint (L, R, H) law restricted to the Gaussian window, with empirical
// moments of the rescaled vector against the predicted covariance.
struct LrhMoments {
    double mean[3] = {0, 0, 0};
    double cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double predicted_cov[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double window_mass = 0.0;
    double mean_contacts_per_site = 0.0;  // E[H_N]/N over the window
};
LrhMoments lrh_joint_law(const WellModel& model, double lambda, double a, int N);

// Table of Z e^{-N F(lambda,a) - c0 {aN}} along a grid of N.
struct PrefactorRow {
    int N = 0;
    double log_Z = 0.0;
    double ratio = 0.0;
};
struct PrefactorReport {
    std::vector<PrefactorRow> rows;
    GaussianConstants constants;
};
PrefactorReport partition_prefactor(const WellModel& model, double lambda, double a,
                                    const std::vector<int>& N_grid);

// P(S_i > 0 for all i >= 1) under a positive-drift step law: horizon-doubling
// DP, and the exact ruin formula for skip-free descending laws.
double survival_probability(const TiltedLaw& step);
double survival_skipfree(const TiltedLaw& step);

// Tilted step law of the ramp on one side: the minus side tilts the mirrored
// walk. For the built-in symmetric families the mirror is the law itself.
TiltedLaw ramp_step_law(const IncrementLaw& law, Sign sign, double x);

}  // namespace wetting
