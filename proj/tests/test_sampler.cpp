#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "support.hpp"
#include "wetting/sampler.hpp"

using namespace wetting;
using namespace testsupport;

namespace {

// Exact distribution of the running maximum of a positive excursion of
// length n: first-return mass with the interior capped at h.
double capped_first_return(const IncrementLaw& law, int n, int h) {
    std::vector<double> cur(static_cast<std::size_t>(h), 0.0), next(cur);
    for (int y = 1; y <= h; ++y) cur[static_cast<std::size_t>(y - 1)] = law.pmf(y);
    if (n == 1) return law.pmf(0);
    for (int k = 2; k < n; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 1; x <= h; ++x) {
            double m = cur[static_cast<std::size_t>(x - 1)];
            if (m == 0.0) continue;
            for (int y = std::max(1, x + law.table_min());
                 y <= std::min(h, x + law.table_max()); ++y)
                next[static_cast<std::size_t>(y - 1)] += m * law.pmf(y - x);
        }
        std::swap(cur, next);
    }
    double ret = 0.0;
    for (int x = 1; x <= h; ++x) ret += cur[static_cast<std::size_t>(x - 1)] * law.pmf(-x);
    return ret;
}

const WellPathSampler& benchmark_sampler() {
    static WellPathSampler s(lazy_well(), 3.0, 0.05, 1000);
    return s;
}

}  // namespace

TEST_CASE("samplers are deterministic per (seed, stream)") {
    const WellPathSampler& s = benchmark_sampler();
    PathSample a = s.sample(7, 3);
    PathSample b = s.sample(7, 3);
    PathSample c = s.sample(7, 4);
    CHECK(a.heights == b.heights);
    CHECK(a.contacts == b.contacts);
    CHECK(a.heights != c.heights);
}

TEST_CASE("well paths respect the constraints exactly") {
    const WellPathSampler& s = benchmark_sampler();
    const int A = s.depth();
    for (int i = 0; i < 200; ++i) {
        PathSample p = s.sample(42, static_cast<std::uint64_t>(i));
        REQUIRE(p.heights.size() == 1001);
        CHECK(p.heights.front() == 0);
        CHECK(p.heights.back() == 0);
        std::vector<int> touched;
        for (std::size_t n = 0; n < p.heights.size(); ++n) {
            CHECK(p.heights[n] >= -A);
            if (n >= 1 && p.heights[n] == -A) touched.push_back(static_cast<int>(n));
        }
        CHECK(touched == p.contacts);
        CHECK(std::is_sorted(p.contacts.begin(), p.contacts.end()));
    }
}

TEST_CASE("excursion sampler: strict interior positivity, exact endpoints") {
    IncrementLaw law = IncrementLaw::lazy(0.4);
    Rng rng(11);
    for (int n : {1, 2, 7, 40}) {
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<int> exc = sample_excursion(law, n, rng);
            REQUIRE(static_cast<int>(exc.size()) == n + 1);
            CHECK(exc.front() == 0);
            CHECK(exc.back() == 0);
            for (int k = 1; k < n; ++k) CHECK(exc[static_cast<std::size_t>(k)] > 0);
        }
    }
    // a law without a zero step cannot produce a length-1 excursion
    IncrementLaw nozero = IncrementLaw::custom({{-1, 0.35}, {1, 0.35}, {-2, 0.1},
                                                {2, 0.1}, {3, 0.05}, {-3, 0.05}});
    Rng rng2(1);
    CHECK_THROWS_AS(sample_excursion(nozero, 1, rng2), std::invalid_argument);
}

TEST_CASE("excursion maximum matches the exact DP law (TV distance)") {
    IncrementLaw law = IncrementLaw::lazy(0.4);
    const int n = 50;
    const int samples = 100000;
    ExcursionSampler sampler(law);
    Rng rng(2024);
    std::map<int, double> emp;
    for (int i = 0; i < samples; ++i) {
        std::vector<int> exc = sampler.sample(n, rng);
        emp[*std::max_element(exc.begin(), exc.end())] += 1.0 / samples;
    }
    double fn = capped_first_return(law, n, n);  // unconstrained (cap n is free)
    double tv = 0.0, prev = 0.0;
    for (int h = 1; h <= n; ++h) {
        double cum = capped_first_return(law, n, h) / fn;
        double exact = cum - prev;
        prev = cum;
        double e = emp.count(h) ? emp[h] : 0.0;
        tv += std::abs(e - exact);
    }
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("contact gaps follow the conditioned kernel (chi^2)") {
    const RenewalModel& m = *lazy_renewal();
    const int N = 1000;
    TiltedRenewal t = m.tilted_renewal(3.0, N);
    Rng rng(5);
    const int samples = 100000;
    std::vector<int> counts;
    for (int i = 0; i < samples; ++i) {
        std::vector<int> contacts = sample_contacts(t, N, rng);
        int first = contacts.front();
        if (static_cast<std::size_t>(first) >= counts.size())
            counts.resize(static_cast<std::size_t>(first) + 1, 0);
        counts[static_cast<std::size_t>(first)]++;
        CHECK(contacts.back() == N);
    }
    // expected first-gap law: Ktilde(m) mass(N-m) / mass(N)
    std::vector<double> expect(counts.size(), 0.0);
    for (std::size_t mm = 1; mm < expect.size(); ++mm)
        expect[mm] = t.Ktilde[mm] * t.mass[N - mm] / t.mass[N] * samples;
    // pool cells with expectation < 10 into the tail
    double chi2 = 0.0;
    int dof = -1;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t mm = 1; mm < expect.size(); ++mm) {
        if (expect[mm] >= 10.0) {
            double d = counts[mm] - expect[mm];
            chi2 += d * d / expect[mm];
            ++dof;
        } else {
            pooled_obs += counts[mm];
            pooled_exp += expect[mm];
        }
    }
    if (pooled_exp > 10.0) {
        double d = pooled_obs - pooled_exp;
        chi2 += d * d / pooled_exp;
        ++dof;
    }
    REQUIRE(dof > 5);
    CHECK(chi2_pvalue(chi2, dof) > 0.01);
}

TEST_CASE("contact density approaches 1/m_lambda") {
    const RenewalModel& m = *lazy_renewal();
    const int N = 1000;
    TiltedRenewal t = m.tilted_renewal(3.0, N);
    Rng rng(6);
    const int paths = 2000;
    double total = 0.0, total2 = 0.0;
    for (int i = 0; i < paths; ++i) {
        double c = static_cast<double>(sample_contacts(t, N, rng).size());
        total += c;
        total2 += c * c;
    }
    double mean = total / paths;
    double sd = std::sqrt((total2 / paths - mean * mean) / paths);
    CHECK(std::abs(mean / N - 1.0 / t.gap_mean) <= 3.0 * sd / N + 1e-3);
}

TEST_CASE("well-path observables match the exact law") {
    const WellPathSampler& s = benchmark_sampler();
    const LrLaw& lr = s.lr_law();
    const int N = 1000;
    const int paths = 20000;

    double sl = 0.0, sr = 0.0, sl2 = 0.0, sr2 = 0.0;
    std::map<int, double> emp_l;
    for (int i = 0; i < paths; ++i) {
        PathSample p = s.sample(123, static_cast<std::uint64_t>(i));
        REQUIRE(!p.contacts.empty());  // dry atom ~ 1e-7 here
        double l = p.contacts.front(), r = p.contacts.back();
        sl += l; sr += r; sl2 += l * l; sr2 += r * r;
        emp_l[p.contacts.front()] += 1.0 / paths;
    }
    double ml = sl / paths, mr = sr / paths;
    double se_l = std::sqrt((sl2 / paths - ml * ml) / paths);
    double se_r = std::sqrt((sr2 / paths - mr * mr) / paths);
    CHECK(std::abs(ml - lr.mean_l) <= 3.0 * se_l);
    CHECK(std::abs(mr - lr.mean_r) <= 3.0 * se_r);

    // TV of the L marginal against the exact wedge marginal; the bound is the
    // expected sampling noise at this sample count (the 1e5-sample gate with
    // the tight 0.02 threshold lives in the acceptance suite)
    std::vector<double> exact_l(static_cast<std::size_t>(N), 0.0);
    for (int l = 1; l < N; ++l)
        for (int r = l; r < N; ++r) exact_l[static_cast<std::size_t>(l)] += lr.prob(l, r);
    double tv = 0.0;
    for (int l = 1; l < N; ++l) {
        double e = emp_l.count(l) ? emp_l[l] : 0.0;
        tv += std::abs(e - exact_l[static_cast<std::size_t>(l)]);
    }
    CHECK(tv / 2.0 < 0.05);
}

TEST_CASE("dry parameters produce almost no wet samples") {
    const WellModel& w = lazy_well();
    double lam = 1.9;
    double a = 2.0 * w.critical_depth(lam).a_c;
    WellPathSampler s(w, lam, a, 1000);
    CHECK(s.lr_law().dry_atom > 0.999);
    int wet = 0;
    for (int i = 0; i < 500; ++i) {
        PathSample p = s.sample(9, static_cast<std::uint64_t>(i));
        if (!p.contacts.empty()) ++wet;
        CHECK(p.heights.front() == 0);
        CHECK(p.heights.back() == 0);
    }
    CHECK(wet <= 2);
}
