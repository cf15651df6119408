#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>

#include "support.hpp"
#include "wetting/exact.hpp"

using namespace wetting;
using namespace testsupport;

TEST_CASE("floor of a*N is robust against binary rounding") {
    CHECK(floor_depth(0.05, 2000).first == 100);
    CHECK(floor_depth(0.05, 2000).second == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(floor_depth(0.29, 100).first == 29);  // 0.29*100 = 28.999999999999996
    CHECK(floor_depth(0.05, 2010).first == 100);
    CHECK(floor_depth(0.05, 2010).second == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Q table small cases by enumeration") {
    IncrementLaw law = IncrementLaw::lazy(0.4);
    QTable q = q_table(law, 1, 6, Sign::plus);
    // Q(1,1) = P(X=1); Q(2,1) = P(1,1)->(1,0 step) = 0.4*0.2
    CHECK(std::exp(q.log_q[1]) == doctest::Approx(0.4).epsilon(1e-13));
    CHECK(std::exp(q.log_q[2]) == doctest::Approx(0.08).epsilon(1e-13));
    // Q(3,1): paths 1,1,1? no: S3=1 via (1,1,1)x? heights (1,2,1): .4*.4*.4,
    // (1,1->1 flat twice): (1,1,1) flat-flat: .4*.2*.2
    double expected = 0.4 * 0.4 * 0.4 + 0.4 * 0.2 * 0.2;
    CHECK(std::exp(q.log_q[3]) == doctest::Approx(expected).epsilon(1e-13));

    QTable qm = q_table(law, 2, 6, Sign::minus);
    // Q_-(2,2) = P(S1=-1, S2=-2) = 0.16
    CHECK(std::exp(qm.log_q[2]) == doctest::Approx(0.16).epsilon(1e-13));

    // x = 0 belongs to first_return_table, not here
    CHECK_THROWS_AS(q_table(law, 0, 5, Sign::plus), std::invalid_argument);
}

TEST_CASE("Q asymptotics: positivity-constrained local limit theorem") {
    // Q_+(n, n/2) sqrt(2 pi n) e^{n I(x_n/n)} -> p_x sqrt(I''(x)) at x = 1/2
    IncrementLaw law = IncrementLaw::lazy(0.4);
    RateFunction rf(law, Sign::plus);
    int n = 2000;
    QTable q = q_table(law, n / 2, n, Sign::plus);
    double I = rf.rate(0.5);
    double scaled =
        std::exp(q.log_q[static_cast<std::size_t>(n)] + n * I) * std::sqrt(2.0 * M_PI * n);
    TiltedLaw step = ramp_step_law(law, Sign::plus, 0.5);
    double p_exact = survival_skipfree(step);
    CHECK(p_exact == doctest::Approx(0.5).epsilon(1e-10));  // p - q = drift for +-1 steps
    double target = p_exact * std::sqrt(rf.derivatives(0.5).second);
    CHECK(scaled == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("survival probability: DP horizon vs skip-free ruin formula") {
    IncrementLaw law = IncrementLaw::lazy(0.4);
    for (double x : {0.2, 0.5, 0.8}) {
        TiltedLaw step = ramp_step_law(law, Sign::plus, x);
        CHECK(survival_probability(step) ==
              doctest::Approx(survival_skipfree(step)).epsilon(1e-7));
    }
    // geometric walk is not skip-free
    TiltedLaw gstep = ramp_step_law(IncrementLaw::geometric(0.4), Sign::plus, 0.5);
    CHECK_THROWS_AS(survival_skipfree(gstep), std::invalid_argument);
    CHECK(survival_probability(gstep) > 0.0);
}

TEST_CASE("well partition reduces to the flat model at a = 0") {
    const WellModel& w = lazy_well();
    for (int N : {50, 150, 300}) {
        WetDrySplit s = well_partition(w, 3.0, 0.0, N);
        double flat = w.renewal().log_flat_partition(3.0, N);
        CHECK(s.log_Z == doctest::Approx(flat).epsilon(1e-10));
        CHECK(std::isinf(s.log_Zbar));
    }
}

TEST_CASE("monolithic DP equals the three-factor assembly") {
    const WellModel& lw = lazy_well();
    for (int N : {60, 120, 200}) {
        WetDrySplit s = well_partition(lw, 3.0, 0.1, N);
        double mono = log_well_partition_monolithic(lw.renewal().law(), 3.0, 0.1, N);
        CHECK(s.log_Z == doctest::Approx(mono).epsilon(1e-9));
    }
    const WellModel& gw = geometric_well();
    for (int N : {60, 150}) {
        WetDrySplit s = well_partition(gw, 3.0, 0.08, N);
        double mono = log_well_partition_monolithic(gw.renewal().law(), 3.0, 0.08, N);
        CHECK(s.log_Z == doctest::Approx(mono).epsilon(1e-9));
    }
}

TEST_CASE("free energy of the well from the exact partition function") {
    const WellModel& w = lazy_well();
    double F = w.solve(3.0, 0.05).free_energy;
    double prev_gap = kInf;
    for (int N : {250, 500, 1000, 2000}) {
        WetDrySplit s = well_partition(w, 3.0, 0.05, N);
        double gap = std::abs(s.log_Z / N - F);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
}

TEST_CASE("depth beyond abar kills the contact part") {
    const WellModel& w = lazy_well();
    WetDrySplit s = well_partition(w, 3.0, 0.7, 100);
    CHECK(std::isinf(s.log_Zcheck));
    CHECK(s.log_Z == doctest::Approx(s.log_Zbar));
}

TEST_CASE("joint (L,R) law equals exhaustive path enumeration at small N") {
    // every lazy path of length 8 in a well of depth 2, by brute force
    const WellModel& w = lazy_well();
    const IncrementLaw& law = w.renewal().law();
    const int N = 8, A = 2;
    const double lambda = 3.0, a = 0.25;  // floor(0.25 * 8) = 2

    double Z = 0.0, Zbar = 0.0;
    std::map<std::pair<int, int>, double> lr_weight;
    std::vector<int> steps(N, -1);
    while (true) {
        double prob = 1.0;
        int s = 0, contacts = 0, first = -1, last = -1;
        bool valid = true;
        for (int i = 0; i < N; ++i) {
            prob *= law.pmf(steps[static_cast<std::size_t>(i)]);
            s += steps[static_cast<std::size_t>(i)];
            if (s < -A) { valid = false; break; }
            if (s == -A) {
                ++contacts;
                if (first < 0) first = i + 1;
                last = i + 1;
            }
        }
        if (valid && s == 0 && prob > 0.0) {
            double weight = prob * std::pow(lambda, contacts);
            Z += weight;
            if (contacts == 0) Zbar += weight;
            else lr_weight[{first, last}] += weight;
        }
        int k = 0;
        while (k < N && steps[static_cast<std::size_t>(k)] == 1) steps[static_cast<std::size_t>(k++)] = -1;
        if (k == N) break;
        ++steps[static_cast<std::size_t>(k)];
    }

    LrLaw lr = lr_joint_law(w, lambda, a, N);
    CHECK(std::exp(lr.split.log_Z) == doctest::Approx(Z).epsilon(1e-12));
    CHECK(std::exp(lr.split.log_Zbar) == doctest::Approx(Zbar).epsilon(1e-12));
    for (auto& [key, weight] : lr_weight)
        CHECK(lr.prob(key.first, key.second) ==
              doctest::Approx(weight / Z).epsilon(1e-12));
    CHECK(lr.dry_atom == doctest::Approx(Zbar / Z).epsilon(1e-12));
}

TEST_CASE("gaussian constants at the lazy benchmark") {
    const WellModel& w = lazy_well();
    GaussianConstants gc = gaussian_constants(w, 3.0, 0.05);
    CHECK(gc.u_star == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(gc.v_star == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(gc.sigma1 * gc.sigma1 == doctest::Approx(7.0 / 30.0).epsilon(1e-9));
    CHECK(gc.sigma2 * gc.sigma2 == doctest::Approx(7.0 / 30.0).epsilon(1e-9));
    // fractional-depth modulation = sum of the two tilts = 2 log 2
    CHECK(gc.c0 == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-9));
    CHECK(gc.m_lambda == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(gc.p_minus == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(gc.c1 == doctest::Approx(1.5).epsilon(1e-6));

    CHECK_THROWS_AS(gaussian_constants(w, 1.2, 0.05), std::invalid_argument);
}

TEST_CASE("joint (L,R) law: normalization and concentration at the maximizer") {
    const WellModel& w = lazy_well();
    const int N = 1000;
    LrLaw law = lr_joint_law(w, 3.0, 0.05, N);

    double wet = 0.0;
    for (int l = 1; l < N; ++l)
        for (int r = l; r < N; ++r) wet += law.prob(l, r);
    CHECK(wet + law.dry_atom == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(law.dry_atom < 1e-6);  // deep in the wet phase

    CHECK(law.mean_l / N == doctest::Approx(0.1).epsilon(2.0 / std::sqrt(N)));
    CHECK(law.mean_r / N == doctest::Approx(0.9).epsilon(2.0 / std::sqrt(N)));
}

TEST_CASE("local CLT for (L, R): window comparison converges at rate 1/sqrt(N)") {
    const WellModel& w = lazy_well();
    GaussianConstants gc = gaussian_constants(w, 3.0, 0.05);
    // The pointwise gap to the two-factor Gaussian is dominated by the
    // third-order (skewness) term of the exact law, so sup*sqrt(N) is an
    // essentially constant ~7-8 while the sup itself shrinks.
    double prev = kInf;
    for (int N : {500, 1000, 2000}) {
        LrLaw law = lr_joint_law(w, 3.0, 0.05, N);
        GaussianComparison cmp = compare_lr_gaussian(law, gc);
        CHECK(cmp.sup_discrepancy < prev);
        prev = cmp.sup_discrepancy;
        double scaled = cmp.sup_discrepancy * std::sqrt(static_cast<double>(N));
        CHECK(scaled > 5.0);
        CHECK(scaled < 10.0);
        CHECK(cmp.window_mass > 0.95);
    }
    // first and second moments already match at machine scale: the exact-law
    // variance equals sigma1^2 N (checked against the full wedge)
    const int N = 1000;
    LrLaw law = lr_joint_law(w, 3.0, 0.05, N);
    CHECK(law.var_l == doctest::Approx(gc.sigma1 * gc.sigma1 * N).epsilon(1e-3));
    CHECK(law.var_r == doctest::Approx(gc.sigma2 * gc.sigma2 * N).epsilon(1e-3));
    CHECK(std::abs(law.cov_lr) < 0.05 * law.var_l);
}

TEST_CASE("joint (L,R,H) law: moments against the predicted covariance") {
    const WellModel& w = lazy_well();
    const int N = 2000;
    LrhMoments mom = lrh_joint_law(w, 3.0, 0.05, N);
    CHECK(mom.window_mass > 0.999);
    // contact density -> (v*-u*)/m_lambda = 0.8/2
    CHECK(mom.mean_contacts_per_site == doctest::Approx(0.4).epsilon(0.01));
    for (int i = 0; i < 3; ++i) {
        CHECK(mom.cov[i][i] ==
              doctest::Approx(mom.predicted_cov[i][i]).epsilon(0.05));
    }
    CHECK(mom.cov[0][2] == doctest::Approx(mom.predicted_cov[0][2]).epsilon(0.08));
    CHECK(mom.cov[1][2] == doctest::Approx(mom.predicted_cov[1][2]).epsilon(0.08));
    CHECK(std::abs(mom.cov[0][1]) < 0.01);  // L and R asymptotically independent
}

TEST_CASE("partition prefactor stabilizes at the assembled constant") {
    const WellModel& w = lazy_well();
    std::vector<int> grid;
    for (int N = 1000; N <= 2500; N += 137) grid.push_back(N);  // scan the {aN} phases
    PrefactorReport rep = partition_prefactor(w, 3.0, 0.05, grid);
    double c1 = rep.constants.c1;
    for (const auto& row : rep.rows)
        CHECK(row.ratio == doctest::Approx(c1).epsilon(0.02));
}

TEST_CASE("dry phase: contact part is exponentially negligible") {
    const WellModel& w = lazy_well();
    double lam = 1.9;
    double ac = w.critical_depth(lam).a_c;
    double a = 2.0 * ac;  // safely inside the dry region
    REQUIRE(w.solve(lam, a).regime == WellRegime::Dry);
    double prev_ratio = kInf;
    for (int N : {250, 500, 1000}) {
        WetDrySplit s = well_partition(w, lam, a, N);
        double ratio = std::exp(s.log_Zcheck - s.log_Zbar);
        CHECK(ratio < prev_ratio);
        prev_ratio = ratio;
    }
    CHECK(prev_ratio < 1e-3);
}

TEST_CASE("wet phase concentration rate matches the variational gap") {
    const WellModel& w = lazy_well();
    double lam = 3.0, a = 0.05, eps = 0.05;
    GaussianConstants gc = gaussian_constants(w, lam, a);

    auto tail_mass = [&](int N) {
        LrLaw law = lr_joint_law(w, lam, a, N);
        double m = law.dry_atom;
        for (int l = 1; l < N; ++l)
            for (int r = l; r < N; ++r) {
                if (std::abs(static_cast<double>(l) / N - gc.u_star) > eps ||
                    std::abs(static_cast<double>(r) / N - gc.v_star) > eps)
                    m += law.prob(l, r);
            }
        return m;
    };
    double m500 = tail_mass(500), m1000 = tail_mass(1000);
    double c_fit = -(std::log(m1000) - std::log(m500)) / 500.0;
    CHECK(c_fit > 0.0);

    // psi restricted away from the maximizer: grid scan
    double psi = w.solve(lam, a).psi;
    double psi_eps = -kInf;
    int n = 400;
    for (int i = 0; i <= n; ++i)
        for (int j = i; j <= n; ++j) {
            double u = static_cast<double>(i) / n, v = static_cast<double>(j) / n;
            if (std::abs(u - gc.u_star) <= eps && std::abs(v - gc.v_star) <= eps)
                continue;
            psi_eps = std::max(psi_eps, w.g_value(lam, a, u, v));
        }
    double gap = psi - psi_eps;
    CHECK(c_fit == doctest::Approx(gap).epsilon(0.35));
}
