#include "wetting/exact.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

namespace {

// Mirrored table of a law (steps negated); used for minus-side DPs.
std::vector<double> mirrored_pmf(const IncrementLaw& law, int& min_out) {
    int lo = -law.table_max(), hi = -law.table_min();
    std::vector<double> p(static_cast<std::size_t>(hi - lo + 1));
    for (int x = lo; x <= hi; ++x)
        p[static_cast<std::size_t>(x - lo)] = law.pmf(-x);
    min_out = lo;
    return p;
}

struct StepKernel {
    std::vector<double> pmf;
    int min = 0;
    int max() const { return min + static_cast<int>(pmf.size()) - 1; }
    double operator()(int dx) const {
        int i = dx - min;
        if (i < 0 || i >= static_cast<int>(pmf.size())) return 0.0;
        return pmf[static_cast<std::size_t>(i)];
    }
};

StepKernel kernel_for(const IncrementLaw& law, Sign sign) {
    StepKernel k;
    if (sign == Sign::plus) {
        k.min = law.table_min();
        k.pmf.resize(static_cast<std::size_t>(law.table_max() - law.table_min() + 1));
        for (int x = law.table_min(); x <= law.table_max(); ++x)
            k.pmf[static_cast<std::size_t>(x - k.min)] = law.pmf(x);
    } else {
        k.pmf = mirrored_pmf(law, k.min);
    }
    return k;
}

}  // namespace

std::pair<int, double> floor_depth(double a, int N) {
    double t = a * static_cast<double>(N);
    int A = static_cast<int>(std::floor(t + 1e-9));
    double frac = t - A;
    if (frac < 0.0) frac = 0.0;
    return {A, frac};
}

// ---------------------------------------------------------------------------
// Q tables
// ---------------------------------------------------------------------------

QTable q_table(const IncrementLaw& law, int x_target, int n_max, Sign sign) {
    // x_target = 0 is the first-return problem and lives in the renewal module.
    if (x_target < 1 || n_max < 1) throw std::invalid_argument("q_table: bad arguments");
    StepKernel step = kernel_for(law, sign);
    double sigma = std::sqrt(law.variance());
    int cap = x_target +
              static_cast<int>(std::ceil(10.0 * sigma * std::sqrt(static_cast<double>(n_max)))) +
              step.max() + 1;

    QTable out;
    out.x_target = x_target;
    out.sign = sign;
    out.log_q.assign(static_cast<std::size_t>(n_max + 1), -kInf);
    out.log_q[0] = (x_target == 0) ? 0.0 : -kInf;

    // cur[y-1]: constrained mass at strictly positive height y, on log_scale
    std::vector<double> cur(static_cast<std::size_t>(cap), 0.0), next(cur);
    double log_scale = 0.0;
    out.log_q[1] = step(x_target) > 0.0 ? std::log(step(x_target)) : -kInf;
    for (int y = 1; y <= cap; ++y) cur[static_cast<std::size_t>(y - 1)] = step(y);

    for (int n = 2; n <= n_max; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        double hit = 0.0, peak = 0.0;
        for (int x = 1; x <= cap; ++x) {
            double m = cur[static_cast<std::size_t>(x - 1)];
            if (m == 0.0) continue;
            hit += m * step(x_target - x);
            int ylo = std::max(1, x + step.min), yhi = std::min(cap, x + step.max());
            for (int y = ylo; y <= yhi; ++y) {
                double v = next[static_cast<std::size_t>(y - 1)] += m * step(y - x);
                peak = std::max(peak, v);
            }
        }
        out.log_q[static_cast<std::size_t>(n)] =
            hit > 0.0 ? log_scale + std::log(hit) : -kInf;
        if (peak > 0.0 && peak < 1e-120) {
            double inv = 1.0 / peak;
            for (double& v : next) v *= inv;
            log_scale += std::log(peak);
        }
        std::swap(cur, next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Partition functions
// ---------------------------------------------------------------------------

namespace {

// No-contact partition: paths strictly above -A throughout, ending at 0.
double log_nocontact_partition(const IncrementLaw& law, int A, int N) {
    if (A <= 0) return -kInf;  // the endpoint itself would touch the bottom
    StepKernel step = kernel_for(law, Sign::plus);
    double sigma = std::sqrt(law.variance());
    int top = static_cast<int>(std::ceil(10.0 * sigma * std::sqrt(static_cast<double>(N)))) +
              step.max();
    int lo = -A + 1, hi = top;
    int W = hi - lo + 1;

    std::vector<double> cur(static_cast<std::size_t>(W), 0.0), next(cur);
    cur[static_cast<std::size_t>(0 - lo)] = 1.0;
    double log_scale = 0.0;
    for (int n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        double peak = 0.0;
        for (int x = lo; x <= hi; ++x) {
            double m = cur[static_cast<std::size_t>(x - lo)];
            if (m == 0.0) continue;
            int ylo = std::max(lo, x + step.min), yhi = std::min(hi, x + step.max());
            for (int y = ylo; y <= yhi; ++y) {
                double v = next[static_cast<std::size_t>(y - lo)] += m * step(y - x);
                peak = std::max(peak, v);
            }
        }
        if (peak == 0.0) return -kInf;
        if (peak < 1e-120) {
            double inv = 1.0 / peak;
            for (double& v : next) v *= inv;
            log_scale += std::log(peak);
        }
        std::swap(cur, next);
    }
    double final_mass = cur[static_cast<std::size_t>(0 - lo)];
    return final_mass > 0.0 ? log_scale + std::log(final_mass) : -kInf;
}

}  // namespace

double log_well_partition_monolithic(const IncrementLaw& law, double lambda, double a,
                                     int N) {
    auto [A, frac] = floor_depth(a, N);
    (void)frac;
    StepKernel step = kernel_for(law, Sign::plus);
    double sigma = std::sqrt(law.variance());
    int top = static_cast<int>(std::ceil(10.0 * sigma * std::sqrt(static_cast<double>(N)))) +
              step.max();
    int lo = -A, hi = top;
    int W = hi - lo + 1;

    std::vector<double> cur(static_cast<std::size_t>(W), 0.0), next(cur);
    cur[static_cast<std::size_t>(0 - lo)] = 1.0;
    double log_scale = 0.0;
    for (int n = 1; n <= N; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        double peak = 0.0;
        for (int x = lo; x <= hi; ++x) {
            double m = cur[static_cast<std::size_t>(x - lo)];
            if (m == 0.0) continue;
            int ylo = std::max(lo, x + step.min), yhi = std::min(hi, x + step.max());
            for (int y = ylo; y <= yhi; ++y)
                next[static_cast<std::size_t>(y - lo)] += m * step(y - x);
        }
        next[0] *= lambda;  // bottom contact weight at height -A
        for (double v : next) peak = std::max(peak, v);
        if (peak == 0.0) return -kInf;
        if (peak < 1e-120 || peak > 1e120) {
            double inv = 1.0 / peak;
            for (double& v : next) v *= inv;
            log_scale += std::log(peak);
        }
        std::swap(cur, next);
    }
    double final_mass = cur[static_cast<std::size_t>(0 - lo)];
    return final_mass > 0.0 ? log_scale + std::log(final_mass) : -kInf;
}

WetDrySplit well_partition(const WellModel& model, double lambda, double a, int N) {
    if (N < 1) throw std::invalid_argument("well_partition: N >= 1");
    if (N > model.renewal().n_max())
        throw std::invalid_argument("well_partition: N exceeds the renewal table");
    const IncrementLaw& law = model.renewal().law();

    WetDrySplit split;
    split.N = N;
    split.lambda = lambda;
    split.a = a;
    auto [A, frac] = floor_depth(a, N);
    (void)frac;
    split.A = A;

    split.log_Zflat = model.renewal().log_flat_partition_table(lambda, N);

    if (A == 0) {
        // Flat reduction: the bottom is the starting level, L = 0, R = N.
        split.log_Zbar = -kInf;
        split.log_Zcheck = split.log_Zflat.back();
        split.log_Z = split.log_Zcheck;
        split.log_Qminus.assign(static_cast<std::size_t>(N + 1), -kInf);
        split.log_Qplus.assign(static_cast<std::size_t>(N + 1), -kInf);
        split.log_Qminus[0] = 0.0;
        split.log_Qplus[0] = 0.0;
        return split;
    }

    split.log_Qminus = q_table(law, A, N, Sign::minus).log_q;
    split.log_Qplus = q_table(law, A, N, Sign::plus).log_q;
    split.log_Zbar = log_nocontact_partition(law, A, N);
    split.log_contact_weight = std::log(lambda);

    // Feasibility wedge: l >= A/xbar_-, N - r >= A/xbar_+ (zero elsewhere).
    LogAccumulator acc;
    for (int l = 1; l < N; ++l) {
        double ql = split.log_Qminus[static_cast<std::size_t>(l)];
        if (std::isinf(ql)) continue;
        for (int r = l; r < N; ++r) {
            double qr = split.log_Qplus[static_cast<std::size_t>(N - r)];
            if (std::isinf(qr)) continue;
            acc.add(ql + split.log_Zflat[static_cast<std::size_t>(r - l)] + qr);
        }
    }
    split.log_Zcheck = split.log_contact_weight + acc.log_total();

    LogAccumulator tot;
    tot.add(split.log_Zbar);
    tot.add(split.log_Zcheck);
    split.log_Z = tot.log_total();
    return split;
}

// ---------------------------------------------------------------------------
// Joint laws
// ---------------------------------------------------------------------------

LrLaw lr_joint_law(const WellModel& model, double lambda, double a, int N) {
    LrLaw law;
    law.split = well_partition(model, lambda, a, N);
    law.N = N;
    law.A = law.split.A;
    law.lambda = lambda;
    law.a = a;
    law.dry_atom = std::exp(law.split.log_Zbar - law.split.log_Z);

    double wet_mass = 0.0, sl = 0.0, sr = 0.0, sll = 0.0, srr = 0.0, slr = 0.0;
    for (int l = 1; l < N; ++l) {
        double ql = law.split.log_Qminus[static_cast<std::size_t>(l)];
        if (std::isinf(ql)) continue;
        for (int r = l; r < N; ++r) {
            double qr = law.split.log_Qplus[static_cast<std::size_t>(N - r)];
            if (std::isinf(qr)) continue;
            double p = std::exp(law.split.log_contact_weight + ql +
                                law.split.log_Zflat[static_cast<std::size_t>(r - l)] +
                                qr - law.split.log_Z);
            wet_mass += p;
            sl += p * l;
            sr += p * r;
            sll += p * static_cast<double>(l) * l;
            srr += p * static_cast<double>(r) * r;
            slr += p * static_cast<double>(l) * r;
        }
    }
    if (wet_mass > 0.0) {
        law.mean_l = sl / wet_mass;
        law.mean_r = sr / wet_mass;
        law.var_l = sll / wet_mass - law.mean_l * law.mean_l;
        law.var_r = srr / wet_mass - law.mean_r * law.mean_r;
        law.cov_lr = slr / wet_mass - law.mean_l * law.mean_r;
    }
    return law;
}

// ---------------------------------------------------------------------------
// Gaussian constants and comparisons
// ---------------------------------------------------------------------------

TiltedLaw ramp_step_law(const IncrementLaw& law, Sign sign, double x) {
    RateFunction rf(law, sign);
    double t = rf.tilt_for_slope(x);
    if (sign == Sign::plus || law.family() != Family::Custom) {
        // built-in families are symmetric: the mirrored law is the law itself
        return law.tilt(t);
    }
    int mlo = 0;
    std::vector<double> mp = mirrored_pmf(law, mlo);
    std::vector<std::pair<int, double>> entries;
    for (std::size_t i = 0; i < mp.size(); ++i)
        if (mp[i] > 0.0) entries.push_back({mlo + static_cast<int>(i), mp[i]});
    return IncrementLaw::custom(entries).tilt(t);
}

double survival_probability(const TiltedLaw& step) {
    if (!(step.mean() > 0.0))
        throw std::invalid_argument("survival_probability: needs positive drift");
    const int cap = 600 + step.table_max();
    std::vector<double> cur(static_cast<std::size_t>(cap), 0.0), next(cur);
    double safe = 0.0;  // mass that escaped above the cap (never returns, up to 1e-12)
    for (int y = 1; y <= cap; ++y) cur[static_cast<std::size_t>(y - 1)] = step.pmf(y);
    for (int y = cap + 1; y <= cap + step.table_max(); ++y) safe += step.pmf(y);

    double alive = 0.0;
    for (double v : cur) alive += v;
    long long horizon = 64;
    long long n = 1;
    double prev_estimate = safe + alive;
    while (true) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 1; x <= cap; ++x) {
            double m = cur[static_cast<std::size_t>(x - 1)];
            if (m == 0.0) continue;
            for (int dx = step.table_min(); dx <= step.table_max(); ++dx) {
                double p = step.pmf(dx);
                if (p == 0.0) continue;
                int y = x + dx;
                if (y <= 0) continue;  // ruined
                if (y > cap) safe += m * p;
                else next[static_cast<std::size_t>(y - 1)] += m * p;
            }
        }
        std::swap(cur, next);
        ++n;
        alive = 0.0;
        for (double v : cur) alive += v;
        if (alive < 1e-10) return safe + alive;
        if (n >= horizon) {
            double estimate = safe + alive;
            if (prev_estimate - estimate < 1e-8 && alive < 1e-4) return estimate;
            prev_estimate = estimate;
            horizon *= 2;
            if (horizon > (1LL << 22))
                throw std::runtime_error("survival_probability: slow convergence");
        }
    }
}

double survival_skipfree(const TiltedLaw& step) {
    if (step.table_min() != -1)
        throw std::invalid_argument("survival_skipfree: law is not skip-free downward");
    // zeta = P(ever step down one level) solves zeta = sum_x p(x) zeta^{x+1}
    auto h = [&](double z) {
        double s = 0.0;
        for (int x = -1; x <= step.table_max(); ++x)
            if (step.pmf(x) > 0.0) s += step.pmf(x) * std::pow(z, x + 1);
        return s - z;
    };
    double zeta = bisect(h, 0.0, 1.0 - 1e-14, h(0.0), h(1.0 - 1e-14), 1e-15);
    double p = 0.0;
    for (int x = 1; x <= step.table_max(); ++x)
        if (step.pmf(x) > 0.0) p += step.pmf(x) * (1.0 - std::pow(zeta, x));
    return p;
}

GaussianConstants gaussian_constants(const WellModel& model, double lambda, double a) {
    WellSolution sol = model.solve(lambda, a);
    if (sol.regime != WellRegime::WetCramer)
        throw std::invalid_argument("gaussian_constants: outside the Cramer window");

    GaussianConstants gc;
    gc.u_star = sol.u_star;
    gc.v_star = sol.v_star;
    double vbar = 1.0 - sol.v_star;

    const RateFunction& Im = model.rate_fn(Sign::minus);
    const RateFunction& Ip = model.rate_fn(Sign::plus);
    double xm = a / gc.u_star, xp = a / vbar;
    auto [d1m, i2m] = Im.derivatives(xm);
    auto [d1p, i2p] = Ip.derivatives(xp);
    gc.sigma1 = std::sqrt(std::pow(gc.u_star, 3) / (a * a * i2m));
    gc.sigma2 = std::sqrt(std::pow(vbar, 3) / (a * a * i2p));
    // Fractional-depth modulation: the first-order {aN} term of the expansion
    // carries I', and at the maximizer I'(a/w*) = Lambda^{-1}(F).
    gc.c0 = d1m + d1p;

    TiltedRenewal t = model.renewal().tilted_renewal(lambda, 1);
    gc.m_lambda = t.gap_mean;
    gc.sigma3 = std::sqrt((gc.v_star - gc.u_star) * t.gap_var /
                          std::pow(gc.m_lambda, 3));

    gc.p_minus = survival_probability(ramp_step_law(model.renewal().law(), Sign::minus, xm));
    gc.p_plus = survival_probability(ramp_step_law(model.renewal().law(), Sign::plus, xp));
    // One factor of lambda for the contact at L_N itself.
    gc.c1 = lambda * gc.p_minus * gc.p_plus * gc.u_star * vbar / (gc.m_lambda * a * a);
    return gc;
}

GaussianComparison compare_lr_gaussian(const LrLaw& law, const GaussianConstants& gc) {
    GaussianComparison cmp;
    int N = law.N;
    double sqN = std::sqrt(static_cast<double>(N));
    int l0 = static_cast<int>(std::lround(gc.u_star * N));
    int r0 = static_cast<int>(std::lround(gc.v_star * N));
    int wl = static_cast<int>(std::ceil(3.0 * gc.sigma1 * sqN));
    int wr = static_cast<int>(std::ceil(3.0 * gc.sigma2 * sqN));
    double scale = 2.0 * M_PI * N * gc.sigma1 * gc.sigma2;
    for (int l = l0 - wl; l <= l0 + wl; ++l) {
        for (int r = r0 - wr; r <= r0 + wr; ++r) {
            double p = law.prob(l, r);
            cmp.window_mass += p;
            double zl = (l - gc.u_star * N) / sqN;
            double zr = (r - gc.v_star * N) / sqN;
            double kernel = std::exp(-zl * zl / (2.0 * gc.sigma1 * gc.sigma1) -
                                     zr * zr / (2.0 * gc.sigma2 * gc.sigma2));
            cmp.sup_discrepancy = std::max(cmp.sup_discrepancy,
                                           std::abs(scale * p - kernel));
        }
    }
    return cmp;
}

LrhMoments lrh_joint_law(const WellModel& model, double lambda, double a, int N) {
    GaussianConstants gc = gaussian_constants(model, lambda, a);
    LrLaw law = lr_joint_law(model, lambda, a, N);
    ContactTable ct = model.renewal().contact_table(lambda, N);

    LrhMoments mom;
    double sqN = std::sqrt(static_cast<double>(N));
    int l0 = static_cast<int>(std::lround(gc.u_star * N));
    int r0 = static_cast<int>(std::lround(gc.v_star * N));
    int wl = static_cast<int>(std::ceil(6.0 * gc.sigma1 * sqN));
    int wr = static_cast<int>(std::ceil(6.0 * gc.sigma2 * sqN));

    double h_density = (gc.v_star - gc.u_star) / gc.m_lambda;
    double s[3] = {0, 0, 0};
    double ss[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double mass = 0.0, h_mean = 0.0;
    for (int l = std::max(1, l0 - wl); l <= l0 + wl; ++l) {
        for (int r = std::max(l, r0 - wr); r <= std::min(N - 1, r0 + wr); ++r) {
            double plr = law.prob(l, r);
            if (plr == 0.0) continue;
            int m = r - l;
            const auto& row = ct.rows[static_cast<std::size_t>(m)];
            if (row.empty()) continue;
            double norm = 0.0;
            for (double v : row) norm += v;
            for (std::size_t i = 0; i < row.size(); ++i) {
                int k = ct.kmin[static_cast<std::size_t>(m)] + static_cast<int>(i);
                double w = plr * row[i] / norm;
                if (w == 0.0) continue;
                double z[3] = {(l - gc.u_star * N) / sqN, (r - gc.v_star * N) / sqN,
                               (k - h_density * N) / sqN};
                mass += w;
                h_mean += w * k;
                for (int ii = 0; ii < 3; ++ii) {
                    s[ii] += w * z[ii];
                    for (int jj = 0; jj < 3; ++jj) ss[ii][jj] += w * z[ii] * z[jj];
                }
            }
        }
    }
    mom.window_mass = mass;
    mom.mean_contacts_per_site = h_mean / (mass * N);
    for (int i = 0; i < 3; ++i) mom.mean[i] = s[i] / mass;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            mom.cov[i][j] = ss[i][j] / mass - mom.mean[i] * mom.mean[j];

    double m = gc.m_lambda;
    mom.predicted_cov[0][0] = gc.sigma1 * gc.sigma1;
    mom.predicted_cov[1][1] = gc.sigma2 * gc.sigma2;
    mom.predicted_cov[0][1] = mom.predicted_cov[1][0] = 0.0;
    mom.predicted_cov[0][2] = mom.predicted_cov[2][0] = -gc.sigma1 * gc.sigma1 / m;
    mom.predicted_cov[1][2] = mom.predicted_cov[2][1] = gc.sigma2 * gc.sigma2 / m;
    mom.predicted_cov[2][2] =
        (gc.sigma1 * gc.sigma1 + gc.sigma2 * gc.sigma2) / (m * m) + gc.sigma3 * gc.sigma3;
    return mom;
}

PrefactorReport partition_prefactor(const WellModel& model, double lambda, double a,
                                    const std::vector<int>& N_grid) {
    PrefactorReport rep;
    rep.constants = gaussian_constants(model, lambda, a);
    double F = model.solve(lambda, a).free_energy;
    rep.rows.resize(N_grid.size());
    parallel_for(N_grid.size(), [&](std::size_t i) {
        int N = N_grid[i];
        PrefactorRow row;
        row.N = N;
        row.log_Z = log_well_partition_monolithic(model.renewal().law(), lambda, a, N);
        auto [A, frac] = floor_depth(a, N);
        (void)A;
        row.ratio = std::exp(row.log_Z - N * F - rep.constants.c0 * frac);
        rep.rows[i] = row;
    });
    return rep;
}

}  // namespace wetting
