#include "wetting/renewal.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

namespace {

constexpr double kKernelCut = 1e-25;  // relative cutoff for tilted kernel support
constexpr double kBandCut = 1e-30;    // relative cutoff for the contact DP band

int height_cap(const IncrementLaw& law, int n_max) {
    double sigma = std::sqrt(law.variance());
    int cap = static_cast<int>(std::ceil(9.0 * sigma * std::sqrt(static_cast<double>(n_max)))) +
              law.table_max();
    return std::max(cap, law.table_max() + 2);
}

}  // namespace

std::vector<double> first_return_table(const IncrementLaw& law, int n_max) {
    const int smin = law.table_min(), smax = law.table_max();
    const int cap = height_cap(law, n_max);

    std::vector<double> f(static_cast<std::size_t>(n_max + 1), 0.0);
    // cur[y-1] = P(S_1>0,...,S_k>0, S_k=y) for y = 1..cap
    std::vector<double> cur(static_cast<std::size_t>(cap), 0.0);
    std::vector<double> next(static_cast<std::size_t>(cap), 0.0);

    f[1] = law.pmf(0);
    for (int y = 1; y <= cap; ++y) cur[static_cast<std::size_t>(y - 1)] = law.pmf(y);

    for (int n = 2; n <= n_max; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        double ret = 0.0;
        for (int x = 1; x <= cap; ++x) {
            double m = cur[static_cast<std::size_t>(x - 1)];
            if (m == 0.0) continue;
            ret += m * law.pmf(-x);
            int ylo = std::max(1, x + smin), yhi = std::min(cap, x + smax);
            for (int y = ylo; y <= yhi; ++y)
                next[static_cast<std::size_t>(y - 1)] += m * law.pmf(y - x);
        }
        f[static_cast<std::size_t>(n)] = ret;
        std::swap(cur, next);
    }
    return f;
}

// ---------------------------------------------------------------------------
// Model construction
// ---------------------------------------------------------------------------

RenewalModel RenewalModel::from_law(const IncrementLaw& law, int n_max) {
    RenewalModel m;
    m.law_ = law;
    m.n_max_ = n_max;
    m.tail_index_ = 1.5;
    m.fplus_ = first_return_table(law, n_max);
    m.fit_tail();
    m.kappa_ = m.phi_moment(0.0, 0);
    return m;
}

RenewalModel RenewalModel::from_kernel(const KernelSpec& spec, int n_max) {
    RenewalModel m;
    m.n_max_ = n_max;
    m.tail_index_ = spec.tail_index;
    m.fplus_.assign(static_cast<std::size_t>(n_max + 1), 0.0);
    for (int n = 1; n <= n_max; ++n)
        m.fplus_[static_cast<std::size_t>(n)] = spec.fplus0(n);
    if (spec.phi_exact) {
        m.phi_exact_ = spec.phi_exact;
        m.tail_error_ = 0.0;
        m.c1_ = m.d1_ = 0.0;
        m.kappa_ = m.phi_exact_(0.0);
    } else {
        m.fit_tail();
        m.kappa_ = m.phi_moment(0.0, 0);
    }
    return m;
}

void RenewalModel::fit_tail() {
    // Least-squares fit of f_n^+(0) n^s = c1 + d1/n over the last decade of
    // the table; the residual bound feeds the reported truncation budget.
    const double s = tail_index_;
    int hi = n_max_, lo = std::max(2, n_max_ / 2);
    double S0 = 0, S1 = 0, S2 = 0, Sy = 0, Sxy = 0;
    for (int n = lo; n <= hi; ++n) {
        double y = fplus_[static_cast<std::size_t>(n)] * std::pow(n, s);
        double x = 1.0 / n;
        S0 += 1.0; S1 += x; S2 += x * x; Sy += y; Sxy += x * y;
    }
    double det = S0 * S2 - S1 * S1;
    c1_ = (Sy * S2 - Sxy * S1) / det;
    d1_ = (S0 * Sxy - S1 * Sy) / det;
    double resid = 0.0;
    for (int n = lo; n <= hi; ++n) {
        double y = fplus_[static_cast<std::size_t>(n)] * std::pow(n, s);
        resid = std::max(resid, std::abs(y - c1_ - d1_ / n));
    }
    tail_error_ = resid * powerlaw_tail(s, static_cast<double>(n_max_));
}

double RenewalModel::phi_moment(double theta, int k) const {
    if (k == 0 && phi_exact_) return phi_exact_(theta);
    double acc = 0.0;
    for (int n = 1; n <= n_max_; ++n) {
        double w = fplus_[static_cast<std::size_t>(n)];
        if (w == 0.0) continue;
        double nk = (k == 0) ? 1.0 : (k == 1 ? n : static_cast<double>(n) * n);
        acc += nk * w * std::exp(-theta * n);
    }
    // Tail beyond the table from the fitted power law; exact kernels with a
    // closed Phi never reach this branch for k = 0.
    double s = tail_index_ - k;
    double M = static_cast<double>(n_max_);
    if (c1_ != 0.0 || d1_ != 0.0) {
        if (theta == 0.0 && s <= 1.0) return kInf;
        acc += c1_ * powerlaw_exp_tail(s, theta, M) + d1_ * powerlaw_exp_tail(s + 1.0, theta, M);
    } else if (phi_exact_ && k > 0) {
        // Closed-kernel moments: power-law tail with the exact coefficient.
        if (theta == 0.0 && s <= 1.0) return kInf;
        double cexact = fplus_[static_cast<std::size_t>(n_max_)] * std::pow(M, tail_index_);
        acc += cexact * powerlaw_exp_tail(s, theta, M);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Free energy
// ---------------------------------------------------------------------------

double RenewalModel::free_energy(double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("free_energy: lambda must be > 0");
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->values.find(lambda);
        if (it != cache_->values.end()) return it->second;
    }
    double F = solve_free_energy(lambda);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (cache_->values.size() > 4096) cache_->values.clear();
    cache_->values.emplace(lambda, F);
    return F;
}

double RenewalModel::solve_free_energy(double lambda) const {
    double target = 1.0 / lambda;
    if (kappa_ <= target) return 0.0;

    double hi = 1.0;
    while (phi_moment(hi, 0) > target) hi *= 2.0;
    // g increasing in theta
    auto g = [&](double th) { return target - phi_moment(th, 0); };
    auto gp = [&](double th) { return phi_moment(th, 1); };
    return newton_bracketed(g, gp, 0.0, hi, 1e-16 * std::max(1.0, target), 1e-13);
}

double RenewalModel::free_energy_deriv(double lambda) const {
    double F = free_energy(lambda);
    if (F <= 0.0 && kappa_ * lambda < 1.0) return 0.0;
    double m1 = phi_moment(F, 1);
    return 1.0 / (lambda * lambda * m1);
}

double RenewalModel::free_energy_error(double lambda) const {
    double F = free_energy(lambda);
    if (F == 0.0) return 0.0;
    double slope = phi_moment(F, 1);  // |dPhi/dtheta|
    return tail_error_ / slope;
}

// ---------------------------------------------------------------------------
// Tilted renewal
// ---------------------------------------------------------------------------

TiltedRenewal RenewalModel::tilted_renewal(double lambda, int N_max) const {
    double F = free_energy(lambda);
    if (F <= 0.0)
        throw std::invalid_argument("tilted_renewal: lambda is not supercritical");

    TiltedRenewal t;
    t.lambda = lambda;
    t.F = F;

    int msup = 1;
    double peak = 0.0;
    std::vector<double> K(1, 0.0);
    for (int m = 1; m <= n_max_; ++m) {
        double v = lambda * fplus_[static_cast<std::size_t>(m)] * std::exp(-F * m);
        K.push_back(v);
        peak = std::max(peak, v);
        if (v > kKernelCut * peak) msup = m;
        if (v < kKernelCut * peak && F * m > 60.0) break;
    }
    K.resize(static_cast<std::size_t>(msup + 1));
    t.Ktilde = std::move(K);

    t.gap_mean = lambda * phi_moment(F, 1);
    t.gap_var = lambda * phi_moment(F, 2) - t.gap_mean * t.gap_mean;

    t.mass.assign(static_cast<std::size_t>(N_max + 1), 0.0);
    t.mass[0] = 1.0;
    for (int n = 1; n <= N_max; ++n) {
        double u = 0.0;
        int mhi = std::min(n, t.m_support());
        for (int m = 1; m <= mhi; ++m)
            u += t.Ktilde[static_cast<std::size_t>(m)] * t.mass[static_cast<std::size_t>(n - m)];
        t.mass[static_cast<std::size_t>(n)] = u;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Flat partition function
// ---------------------------------------------------------------------------

std::vector<double> RenewalModel::log_flat_partition_table(double lambda, int N) const {
    if (N > n_max_)
        throw std::invalid_argument("flat_partition: N exceeds the first-return table");
    std::vector<double> logw(static_cast<std::size_t>(N + 1), -kInf);
    for (int j = 1; j <= N; ++j) {
        double f = fplus_[static_cast<std::size_t>(j)];
        if (f > 0.0) logw[static_cast<std::size_t>(j)] = std::log(lambda * f);
    }
    std::vector<double> logZ(static_cast<std::size_t>(N + 1), -kInf);
    logZ[0] = 0.0;
    for (int m = 1; m <= N; ++m) {
        LogAccumulator acc;
        for (int j = 1; j <= m; ++j) {
            double lw = logw[static_cast<std::size_t>(j)];
            if (std::isinf(lw)) continue;
            acc.add(lw + logZ[static_cast<std::size_t>(m - j)]);
        }
        logZ[static_cast<std::size_t>(m)] = acc.log_total();
    }
    return logZ;
}

double RenewalModel::log_flat_partition(double lambda, int N) const {
    return log_flat_partition_table(lambda, N).back();
}

// ---------------------------------------------------------------------------
// Contact-number law
// ---------------------------------------------------------------------------

ContactTable RenewalModel::contact_table(double lambda, int N) const {
    TiltedRenewal t = tilted_renewal(lambda, N);
    const int msup = t.m_support();

    ContactTable tab;
    tab.kmin.assign(static_cast<std::size_t>(N + 1), 0);
    tab.rows.resize(static_cast<std::size_t>(N + 1));
    tab.rows[0] = {1.0};  // g_0(0) = 1

    for (int n = 1; n <= N; ++n) {
        int klo = N + 1, khi = -1;
        int mhi = std::min(n, msup);
        // support of g_n: k-1 ranges over supports of g_{n-m}
        for (int m = 1; m <= mhi; ++m) {
            if (t.Ktilde[static_cast<std::size_t>(m)] == 0.0) continue;
            const auto& prev = tab.rows[static_cast<std::size_t>(n - m)];
            if (prev.empty()) continue;
            klo = std::min(klo, tab.kmin[static_cast<std::size_t>(n - m)] + 1);
            khi = std::max(khi, tab.kmin[static_cast<std::size_t>(n - m)] +
                                    static_cast<int>(prev.size()));
        }
        if (khi < klo) continue;
        std::vector<double> row(static_cast<std::size_t>(khi - klo + 1), 0.0);
        for (int m = 1; m <= mhi; ++m) {
            double Km = t.Ktilde[static_cast<std::size_t>(m)];
            if (Km == 0.0) continue;
            const auto& prev = tab.rows[static_cast<std::size_t>(n - m)];
            int pk = tab.kmin[static_cast<std::size_t>(n - m)];
            for (std::size_t i = 0; i < prev.size(); ++i) {
                if (prev[i] == 0.0) continue;
                row[static_cast<std::size_t>(pk + static_cast<int>(i) + 1 - klo)] += Km * prev[i];
            }
        }
        // trim the band
        double rowmax = 0.0;
        for (double v : row) rowmax = std::max(rowmax, v);
        double cut = rowmax * kBandCut;
        int lo_i = 0, hi_i = static_cast<int>(row.size()) - 1;
        while (lo_i < hi_i && row[static_cast<std::size_t>(lo_i)] < cut) ++lo_i;
        while (hi_i > lo_i && row[static_cast<std::size_t>(hi_i)] < cut) --hi_i;
        tab.kmin[static_cast<std::size_t>(n)] = klo + lo_i;
        tab.rows[static_cast<std::size_t>(n)] =
            std::vector<double>(row.begin() + lo_i, row.begin() + hi_i + 1);
    }
    return tab;
}

ContactNumberLaw RenewalModel::contact_number_law(double lambda, int N) const {
    ContactTable tab = contact_table(lambda, N);
    TiltedRenewal t = tilted_renewal(lambda, N);

    ContactNumberLaw law;
    law.N = N;
    law.lambda = lambda;
    law.gap_mean = t.gap_mean;

    double norm = 0.0;  // = P(N in tau)
    const auto& row = tab.rows[static_cast<std::size_t>(N)];
    for (double v : row) norm += v;

    int kmax = tab.kmin[static_cast<std::size_t>(N)] + static_cast<int>(row.size());
    law.pmf.assign(static_cast<std::size_t>(kmax + 1), 0.0);
    for (std::size_t i = 0; i < row.size(); ++i)
        law.pmf[static_cast<std::size_t>(tab.kmin[static_cast<std::size_t>(N)] +
                                         static_cast<int>(i))] = row[i] / norm;

    double sig = std::sqrt(t.contact_sigma2());
    law.gaussian.assign(law.pmf.size(), 0.0);
    for (std::size_t k = 0; k < law.gaussian.size(); ++k) {
        double z = (N - static_cast<double>(k) * t.gap_mean) / std::sqrt(static_cast<double>(N));
        law.gaussian[k] = t.gap_mean / std::sqrt(static_cast<double>(N)) *
                          std::exp(-z * z / (2.0 * sig * sig)) / (std::sqrt(2.0 * M_PI) * sig);
    }
    return law;
}

// ---------------------------------------------------------------------------
// Critical behaviour and ladder DP
// ---------------------------------------------------------------------------

CriticalAsymptoticsReport RenewalModel::critical_asymptotics(
    const std::vector<double>& u_grid) const {
    CriticalAsymptoticsReport rep;
    double lc = lambda_c();
    double first_moment = phi_moment(0.0, 1);
    rep.transient = std::isfinite(first_moment);
    if (rep.transient) {
        rep.predicted = kappa_ * kappa_ / first_moment;  // slope of F at lambda_c
    } else if (law_) {
        double p_pos = 1.0 - kappa_;
        double c3 = 0.5 * std::pow(kappa_, 4) / (p_pos * p_pos);
        rep.predicted = c3 * law_->variance();
    } else {
        rep.predicted = 0.0;  // no finite-variance prediction for this kernel
    }
    for (double u : u_grid) {
        CriticalRow row;
        row.u = u;
        row.free_energy = free_energy(lc + u);
        row.ratio = rep.transient ? row.free_energy / u : row.free_energy / (u * u);
        rep.rows.push_back(row);
    }
    return rep;
}

LadderReport RenewalModel::ladder_distribution() const {
    if (!law_) throw std::logic_error("ladder_distribution: lattice law required");
    const IncrementLaw& law = *law_;
    const int smin = law.table_min(), smax = law.table_max();
    const int cap = height_cap(law, n_max_);
    const int hmax = -smin;  // deepest reachable overshoot below 0 in one step

    LadderReport rep;
    rep.height_pmf.assign(static_cast<std::size_t>(hmax + 1), 0.0);

    // walk restricted to > 0; absorb on the first step into (-inf, 0]
    std::vector<double> cur(static_cast<std::size_t>(cap), 0.0), next(cur);
    for (int dx = smin; dx <= 0; ++dx)
        rep.height_pmf[static_cast<std::size_t>(-dx)] += law.pmf(dx);
    for (int y = 1; y <= cap; ++y) cur[static_cast<std::size_t>(y - 1)] = law.pmf(y);

    for (int n = 2; n <= n_max_; ++n) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int x = 1; x <= cap; ++x) {
            double m = cur[static_cast<std::size_t>(x - 1)];
            if (m == 0.0) continue;
            for (int dx = smin; dx <= std::min(smax, cap - x); ++dx) {
                double p = law.pmf(dx);
                if (p == 0.0) continue;
                int y = x + dx;
                if (y <= 0)
                    rep.height_pmf[static_cast<std::size_t>(-y)] += m * p;
                else
                    next[static_cast<std::size_t>(y - 1)] += m * p;
            }
        }
        std::swap(cur, next);
    }
    for (double v : cur) rep.unabsorbed += v;
    // The height-0 atom is exactly kappa; restore its n^{-3/2} tail.
    rep.p_zero_corrected = rep.height_pmf[0];
    if (c1_ != 0.0)
        rep.p_zero_corrected += c1_ * powerlaw_tail(tail_index_, n_max_) +
                                d1_ * powerlaw_tail(tail_index_ + 1.0, n_max_);
    return rep;
}

}  // namespace wetting
