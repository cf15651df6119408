#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support.hpp"
#include "wetting/renewal.hpp"

using namespace wetting;
using namespace testsupport;

TEST_CASE("first-return probabilities by enumeration") {
    const RenewalModel& m = *lazy_renewal();
    // length 1: stay put; length 2: up then down
    CHECK(m.fplus0(1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(m.fplus0(2) == doctest::Approx(0.16).epsilon(1e-14));
    // length 3: 0,0,0 / +1,0,-1(from1: stays then down) -> paths (0,0,0): .2^3? no:
    // f_3 = P(S1>0,S2>0,S3=0) = P(1,1,0-path) = .4*.2*.4 = 0.032
    CHECK(m.fplus0(3) == doctest::Approx(0.4 * 0.2 * 0.4).epsilon(1e-13));
}

TEST_CASE("kappa equals the ladder-height atom") {
    const RenewalModel& m = *lazy_renewal();
    // lazy walk: weak ladder height is 0 unless the first step is -1
    CHECK(m.kappa() == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(m.lambda_c() == doctest::Approx(1.0 / 0.6).epsilon(1e-9));
    CHECK(m.ladder_positive_prob() == doctest::Approx(0.4).epsilon(1e-8));

    // independent first-passage DP route
    LadderReport lad = m.ladder_distribution();
    CHECK(lad.height_pmf.size() == 2);
    double budget = lad.unabsorbed + m.kappa_tail_bound() + 1e-12;
    CHECK(std::abs(lad.p_zero_corrected - m.kappa()) <= budget);
    CHECK(lad.height_pmf[1] == doctest::Approx(0.4).epsilon(1e-12));

    // geometric: ladder height is Geometric(1-gamma) by memorylessness
    const RenewalModel& g = *geometric_renewal();
    CHECK(g.kappa() == doctest::Approx(0.6).epsilon(1e-7));
    LadderReport glad = g.ladder_distribution();
    for (int k = 1; k <= 5; ++k)
        CHECK(std::abs(glad.height_pmf[static_cast<std::size_t>(k)] -
                       0.6 * std::pow(0.4, k)) <= glad.unabsorbed);
}

TEST_CASE("first-return tail follows c1 n^{-3/2}") {
    const RenewalModel& m = *lazy_renewal();
    double sigma = std::sqrt(0.8);
    double c1_formula = m.ladder_positive_prob() / (sigma * std::sqrt(2.0 * M_PI));
    CHECK(m.c1_fitted() == doctest::Approx(c1_formula).epsilon(1e-3));
    // pointwise check at the end of the table
    int n = m.n_max();
    CHECK(m.fplus0(n) * std::pow(n, 1.5) == doctest::Approx(c1_formula).epsilon(1e-3));
}

TEST_CASE("laplace transform of the inter-arrival law") {
    const RenewalModel& m = *lazy_renewal();
    CHECK(m.laplace_K(0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.laplace_K(50.0) == doctest::Approx(m.fplus0(1) / m.kappa() * std::exp(-50.0))
                                    .epsilon(1e-10));
    double prev = 1.0;
    for (double th : {0.01, 0.05, 0.2, 1.0, 3.0}) {
        double cur = m.laplace_K(th);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("free energy against the closed forms") {
    const RenewalModel& lz = *lazy_renewal();
    CHECK(lz.free_energy(1.0) == 0.0);
    CHECK(lz.free_energy(1.0 / 0.6) == 0.0);

    CHECK(lz.free_energy(3.0) == doctest::Approx(std::log(1.2)).epsilon(1e-10));
    for (double lam : {1.7, 2.0, 2.5, 4.0, 7.5, 10.0})
        CHECK(lz.free_energy(lam) ==
              doctest::Approx(lazy_free_energy_closed(0.4, lam)).epsilon(1e-9));

    const RenewalModel& ge = *geometric_renewal();
    CHECK(ge.free_energy(3.0) == doctest::Approx(std::log(2.16 / 1.52)).epsilon(1e-9));
    for (double lam : {1.7, 2.2, 3.5, 6.0, 10.0})
        CHECK(ge.free_energy(lam) ==
              doctest::Approx(geometric_free_energy_closed(0.4, lam)).epsilon(1e-9));
}

TEST_CASE("free energy shape: monotone, with exp-convexity in beta") {
    const RenewalModel& m = *lazy_renewal();
    double prev = 0.0;
    std::vector<double> Fb;
    for (int i = 0; i <= 30; ++i) {
        double beta = -0.5 + i * 0.1;
        double F = m.free_energy(std::exp(beta));
        CHECK(F >= prev - 1e-14);
        prev = std::max(prev, F);
        Fb.push_back(F);
    }
    for (std::size_t i = 1; i + 1 < Fb.size(); ++i)
        CHECK(Fb[i + 1] - 2.0 * Fb[i] + Fb[i - 1] >= -1e-8);
}

TEST_CASE("free energy derivative: implicit vs finite differences") {
    const RenewalModel& m = *lazy_renewal();
    for (double lam : {2.0, 3.0, 5.0}) {
        double h = 1e-6 * lam;
        double fd = (m.free_energy(lam + h) - m.free_energy(lam - h)) / (2.0 * h);
        CHECK(m.free_energy_deriv(lam) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(m.free_energy_error(3.0) < 1e-10);
}

TEST_CASE("critical asymptotics: F(lambda_c + u) / u^2") {
    const RenewalModel& m = *lazy_renewal();
    auto rep = m.critical_asymptotics({1e-1, 1e-2, 1e-3});
    CHECK(!rep.transient);
    // c3 sigma^2 = (1-gamma)^4/gamma at gamma = 0.4
    CHECK(rep.predicted == doctest::Approx(0.324).epsilon(1e-9));
    CHECK(std::abs(rep.rows.back().ratio - 0.324) < 5e-3);
    // approach is monotone toward the limit over this grid
    CHECK(std::abs(rep.rows[2].ratio - 0.324) < std::abs(rep.rows[0].ratio - 0.324));
}

TEST_CASE("tilted renewal: normalization, mean, renewal theorem") {
    const RenewalModel& m = *lazy_renewal();
    TiltedRenewal t = m.tilted_renewal(3.0, 2000);

    double sum = 0.0, mean = 0.0;
    for (int k = 1; k <= t.m_support(); ++k) {
        sum += t.Ktilde[static_cast<std::size_t>(k)];
        mean += k * t.Ktilde[static_cast<std::size_t>(k)];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mean == doctest::Approx(t.gap_mean).epsilon(1e-10));

    int N = static_cast<int>(50 * t.gap_mean);
    CHECK(t.mass[static_cast<std::size_t>(N)] ==
          doctest::Approx(1.0 / t.gap_mean).epsilon(1e-6));

    CHECK_THROWS_AS(m.tilted_renewal(1.0, 100), std::invalid_argument);
}

TEST_CASE("exact identity: Z_N = e^{NF} P(N in tilted tau)") {
    for (auto mp : {lazy_renewal(), geometric_renewal()}) {
        const RenewalModel& m = *mp;
        for (double lam : {2.5, 3.0}) {
            TiltedRenewal t = m.tilted_renewal(lam, 500);
            std::vector<double> logZ = m.log_flat_partition_table(lam, 500);
            for (int N = 1; N <= 500; ++N) {
                double lhs = logZ[static_cast<std::size_t>(N)];
                double rhs = N * t.F + std::log(t.mass[static_cast<std::size_t>(N)]);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("flat partition function values and asymptotics") {
    const RenewalModel& m = *lazy_renewal();
    // exhaustive: Z_{2,lambda} = 0.04 lambda^2 + 0.16 lambda
    CHECK(std::exp(m.log_flat_partition(1.0, 2)) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::exp(m.log_flat_partition(3.0, 2)) ==
          doctest::Approx(0.04 * 9 + 0.16 * 3).epsilon(1e-12));

    // subcritical: Z / K(N) -> kappa lambda / (1 - kappa lambda)^2
    double lam = 1.2;  // kappa lambda = 0.72 < 1
    int N = 2000;
    double Z = std::exp(m.log_flat_partition(lam, N));
    double K_N = m.fplus0(N) / m.kappa();
    double kl = m.kappa() * lam;
    CHECK(Z / K_N == doctest::Approx(kl / ((1.0 - kl) * (1.0 - kl))).epsilon(0.01));

    // supercritical: Z e^{-NF} -> 1/m_lambda
    TiltedRenewal t = m.tilted_renewal(3.0, N);
    double logZ = m.log_flat_partition(3.0, N);
    CHECK(std::exp(logZ - N * t.F) == doctest::Approx(1.0 / t.gap_mean).epsilon(1e-6));
}

TEST_CASE("contact-number law: normalization, density, gaussian overlay") {
    const RenewalModel& m = *lazy_renewal();
    const int N = 2000;
    ContactNumberLaw law = m.contact_number_law(3.0, N);

    double total = 0.0;
    for (double p : law.pmf) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    TiltedRenewal t = m.tilted_renewal(3.0, N);
    CHECK(law.mean() / N == doctest::Approx(1.0 / t.gap_mean).epsilon(5e-3));

    double sup = 0.0;
    for (std::size_t k = 0; k < law.pmf.size(); ++k) {
        double gauss = k < law.gaussian.size() ? law.gaussian[k] : 0.0;
        sup = std::max(sup, std::abs(std::sqrt(static_cast<double>(N)) / t.gap_mean *
                                         (law.pmf[k] - gauss)));
    }
    CHECK(sup < 0.02);
}

TEST_CASE("closed-form kernel plug-in (zeta tail)") {
    // K(n) ~ n^{-3/2}/zeta(3/2): recurrent renewal, kappa chosen arbitrary
    double f0 = 0.25;
    KernelSpec spec;
    spec.name = "powerlaw";
    spec.fplus0 = [f0](int n) { return f0 * std::pow(n, -1.5); };
    spec.tail_index = 1.5;
    RenewalModel m = RenewalModel::from_kernel(spec, 5000);
    CHECK(m.kappa() == doctest::Approx(f0 * std::riemann_zeta(1.5)).epsilon(1e-9));
    double lam = 2.0 / m.kappa();
    double F = m.free_energy(lam);
    CHECK(F > 0.0);
    CHECK(m.phi(F) == doctest::Approx(1.0 / lam).epsilon(1e-10));
}
