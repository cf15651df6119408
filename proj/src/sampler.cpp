#include "wetting/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

namespace {
constexpr double kCellCut = 1e-25;  // relative weight below which wedge cells
                                    // are dropped from the sampling CDF
}

// ---------------------------------------------------------------------------
// Contacts of the conditioned tilted renewal
// ---------------------------------------------------------------------------

std::vector<int> sample_contacts(const TiltedRenewal& tilted, int N, Rng& rng) {
    if (N >= static_cast<int>(tilted.mass.size()))
        throw std::invalid_argument("sample_contacts: mass table too short");
    std::vector<int> contacts;
    std::vector<double> cdf;
    int pos = 0;
    while (pos < N) {
        int mmax = std::min(tilted.m_support(), N - pos);
        cdf.assign(static_cast<std::size_t>(mmax), 0.0);
        double acc = 0.0;
        for (int m = 1; m <= mmax; ++m) {
            acc += tilted.Ktilde[static_cast<std::size_t>(m)] *
                   tilted.mass[static_cast<std::size_t>(N - pos - m)];
            cdf[static_cast<std::size_t>(m - 1)] = acc;
        }
        int m = static_cast<int>(rng.draw_index(cdf)) + 1;
        pos += m;
        contacts.push_back(pos);
    }
    return contacts;
}

// ---------------------------------------------------------------------------
// Positive excursions
// ---------------------------------------------------------------------------

const ExcursionSampler::Table& ExcursionSampler::table_for(int n) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;

    const int smax = law_.table_max(), smin = law_.table_min();
    Table t;
    t.cap.assign(static_cast<std::size_t>(n + 1), 0);
    t.mass.resize(static_cast<std::size_t>(n + 1));
    // exact reachability caps: x <= k smax and x <= (n-k)(-smin)
    for (int k = 1; k < n; ++k)
        t.cap[static_cast<std::size_t>(k)] =
            std::min(k * smax, (n - k) * (-smin));
    for (int k = n - 1; k >= 1; --k) {
        int ck = t.cap[static_cast<std::size_t>(k)];
        if (ck < 1) continue;
        auto& row = t.mass[static_cast<std::size_t>(k)];
        row.assign(static_cast<std::size_t>(ck), 0.0);
        if (k == n - 1) {
            for (int x = 1; x <= ck; ++x)
                row[static_cast<std::size_t>(x - 1)] = law_.pmf(-x);
        } else {
            int cn = t.cap[static_cast<std::size_t>(k + 1)];
            const auto& nxt = t.mass[static_cast<std::size_t>(k + 1)];
            for (int x = 1; x <= ck; ++x) {
                double s = 0.0;
                int ylo = std::max(1, x + smin), yhi = std::min(cn, x + smax);
                for (int y = ylo; y <= yhi; ++y)
                    s += law_.pmf(y - x) * nxt[static_cast<std::size_t>(y - 1)];
                row[static_cast<std::size_t>(x - 1)] = s;
            }
        }
    }
    return cache_.emplace(n, std::move(t)).first->second;
}

std::vector<int> ExcursionSampler::sample(int n, Rng& rng) const {
    if (n < 1) throw std::invalid_argument("sample_excursion: n >= 1");
    if (n == 1) {
        if (law_.pmf(0) <= 0.0)
            throw std::invalid_argument("sample_excursion: length-1 excursion impossible");
        return {0, 0};
    }
    const Table& t = table_for(n);
    const int smax = law_.table_max(), smin = law_.table_min();

    std::vector<int> path(static_cast<std::size_t>(n + 1), 0);
    std::vector<double> cdf;
    int x = 0;
    for (int k = 0; k + 1 < n; ++k) {
        int cn = t.cap[static_cast<std::size_t>(k + 1)];
        const auto& nxt = t.mass[static_cast<std::size_t>(k + 1)];
        int ylo = std::max(1, x + smin), yhi = std::min(cn, x + smax);
        if (ylo > yhi) throw std::runtime_error("sample_excursion: dead end");
        cdf.assign(static_cast<std::size_t>(yhi - ylo + 1), 0.0);
        double acc = 0.0;
        for (int y = ylo; y <= yhi; ++y) {
            acc += law_.pmf(y - x) * nxt[static_cast<std::size_t>(y - 1)];
            cdf[static_cast<std::size_t>(y - ylo)] = acc;
        }
        if (acc <= 0.0) throw std::runtime_error("sample_excursion: impossible length");
        x = ylo + static_cast<int>(rng.draw_index(cdf));
        path[static_cast<std::size_t>(k + 1)] = x;
    }
    path[static_cast<std::size_t>(n)] = 0;
    return path;
}

std::vector<int> sample_excursion(const IncrementLaw& law, int n, Rng& rng) {
    ExcursionSampler s(law);
    return s.sample(n, rng);
}

// ---------------------------------------------------------------------------
// Well paths
// ---------------------------------------------------------------------------

WellPathSampler::WellPathSampler(const WellModel& model, double lambda, double a, int N)
    : model_(model),
      lambda_(lambda),
      a_(a),
      N_(N),
      lr_(lr_joint_law(model, lambda, a, N)),
      tilted_(model.renewal().tilted_renewal(lambda, N)),
      excursions_(model.renewal().law()) {
    // Flatten the feasible wedge into a cumulative table for (L, R) draws.
    double best = -kInf;
    for (int l = 1; l < N_; ++l) {
        double ql = lr_.split.log_Qminus[static_cast<std::size_t>(l)];
        if (std::isinf(ql)) continue;
        for (int r = l; r < N_; ++r) {
            double qr = lr_.split.log_Qplus[static_cast<std::size_t>(N_ - r)];
            if (std::isinf(qr)) continue;
            best = std::max(best, lr_.split.log_Zcheck_lr(l, r));
        }
    }
    double cut = best + std::log(kCellCut);
    double acc = 0.0;
    for (int l = 1; l < N_; ++l) {
        double ql = lr_.split.log_Qminus[static_cast<std::size_t>(l)];
        if (std::isinf(ql)) continue;
        for (int r = l; r < N_; ++r) {
            double qr = lr_.split.log_Qplus[static_cast<std::size_t>(N_ - r)];
            if (std::isinf(qr)) continue;
            double lw = lr_.split.log_Zcheck_lr(l, r);
            if (lw < cut) continue;
            acc += std::exp(lw - best);
            wet_cells_.push_back({l, r});
            wet_cdf_.push_back(acc);
        }
    }
    wet_total_weight_ = acc;
}

const WellPathSampler::RampTable& WellPathSampler::ramp_for(int len, bool mirrored) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(len, mirrored);
    auto it = ramp_cache_.find(key);
    if (it != ramp_cache_.end()) return it->second;

    const IncrementLaw& law = model_.renewal().law();
    const int A = lr_.A;
    int smin = mirrored ? -law.table_max() : law.table_min();
    int smax = mirrored ? -law.table_min() : law.table_max();
    auto step = [&](int dx) { return mirrored ? law.pmf(-dx) : law.pmf(dx); };

    double sigma = std::sqrt(law.variance());
    int top = static_cast<int>(std::ceil(10.0 * sigma * std::sqrt(static_cast<double>(len)))) +
              smax;
    RampTable t;
    t.lo = -A + 1;
    int W = top - t.lo + 1;
    t.mass.assign(static_cast<std::size_t>(len), std::vector<double>());
    // backward mass: from height x at step k, stay > -A and first hit -A at len
    std::vector<double> nxt;
    for (int k = len - 1; k >= 1; --k) {
        auto& row = t.mass[static_cast<std::size_t>(k)];
        row.assign(static_cast<std::size_t>(W), 0.0);
        if (k == len - 1) {
            for (int x = t.lo; x <= top; ++x)
                row[static_cast<std::size_t>(x - t.lo)] = step(-A - x);
        } else {
            const auto& nx = t.mass[static_cast<std::size_t>(k + 1)];
            for (int x = t.lo; x <= top; ++x) {
                double s = 0.0;
                int ylo = std::max(t.lo, x + smin), yhi = std::min(top, x + smax);
                for (int y = ylo; y <= yhi; ++y)
                    s += step(y - x) * nx[static_cast<std::size_t>(y - t.lo)];
                row[static_cast<std::size_t>(x - t.lo)] = s;
            }
        }
    }
    return ramp_cache_.emplace(key, std::move(t)).first->second;
}

std::vector<int> WellPathSampler::sample_ramp(int len, bool mirrored, Rng& rng) const {
    const IncrementLaw& law = model_.renewal().law();
    const int A = lr_.A;
    int smin = mirrored ? -law.table_max() : law.table_min();
    int smax = mirrored ? -law.table_min() : law.table_max();
    auto step = [&](int dx) { return mirrored ? law.pmf(-dx) : law.pmf(dx); };

    std::vector<int> path(static_cast<std::size_t>(len + 1), 0);
    path.back() = -A;
    if (len == 1) return path;  // single step 0 -> -A (weight checked upstream)

    const RampTable& t = ramp_for(len, mirrored);
    int top = t.lo + static_cast<int>(t.mass[1].size()) - 1;
    std::vector<double> cdf;
    int x = 0;
    for (int k = 0; k + 1 < len; ++k) {
        const auto& nx = t.mass[static_cast<std::size_t>(k + 1)];
        int ylo = std::max(t.lo, x + smin), yhi = std::min(top, x + smax);
        cdf.assign(static_cast<std::size_t>(yhi - ylo + 1), 0.0);
        double acc = 0.0;
        for (int y = ylo; y <= yhi; ++y) {
            acc += step(y - x) * nx[static_cast<std::size_t>(y - t.lo)];
            cdf[static_cast<std::size_t>(y - ylo)] = acc;
        }
        if (acc <= 0.0) throw std::runtime_error("sample_ramp: dead end");
        x = ylo + static_cast<int>(rng.draw_index(cdf));
        path[static_cast<std::size_t>(k + 1)] = x;
    }
    return path;
}

void WellPathSampler::ensure_dry_table() const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!dry_table_.empty()) return;
    const IncrementLaw& law = model_.renewal().law();
    const int A = lr_.A;
    int smin = law.table_min(), smax = law.table_max();
    double sigma = std::sqrt(law.variance());
    int top = static_cast<int>(std::ceil(12.0 * sigma * std::sqrt(static_cast<double>(N_)))) +
              smax;
    dry_lo_ = -A + 1;
    int W = top - dry_lo_ + 1;
    dry_table_.assign(static_cast<std::size_t>(N_ + 1), std::vector<double>());
    dry_table_[static_cast<std::size_t>(N_)].assign(static_cast<std::size_t>(W), 0.0);
    dry_table_[static_cast<std::size_t>(N_)][static_cast<std::size_t>(0 - dry_lo_)] = 1.0;
    for (int k = N_ - 1; k >= 1; --k) {
        auto& row = dry_table_[static_cast<std::size_t>(k)];
        row.assign(static_cast<std::size_t>(W), 0.0);
        const auto& nx = dry_table_[static_cast<std::size_t>(k + 1)];
        for (int x = dry_lo_; x <= top; ++x) {
            double s = 0.0;
            int ylo = std::max(dry_lo_, x + smin), yhi = std::min(top, x + smax);
            for (int y = ylo; y <= yhi; ++y)
                s += law.pmf(y - x) * nx[static_cast<std::size_t>(y - dry_lo_)];
            row[static_cast<std::size_t>(x - dry_lo_)] = s;
        }
    }
}

PathSample WellPathSampler::sample(std::uint64_t seed, std::uint64_t path_index) const {
    Rng rng(seed, path_index);
    PathSample out;
    out.seed = seed;
    out.stream = path_index;
    out.heights.assign(static_cast<std::size_t>(N_ + 1), 0);

    const int A = lr_.A;
    bool wet = rng.next_double() >= lr_.dry_atom;
    if (!wet) {
        // bridge conditioned to stay strictly above -A
        ensure_dry_table();
        const IncrementLaw& law = model_.renewal().law();
        int smin = law.table_min(), smax = law.table_max();
        int top = dry_lo_ + static_cast<int>(dry_table_[1].size()) - 1;
        std::vector<double> cdf;
        int x = 0;
        for (int k = 0; k + 1 <= N_; ++k) {
            const auto& nx = dry_table_[static_cast<std::size_t>(k + 1)];
            int ylo = std::max(dry_lo_, x + smin), yhi = std::min(top, x + smax);
            cdf.assign(static_cast<std::size_t>(yhi - ylo + 1), 0.0);
            double acc = 0.0;
            for (int y = ylo; y <= yhi; ++y) {
                acc += law.pmf(y - x) * nx[static_cast<std::size_t>(y - dry_lo_)];
                cdf[static_cast<std::size_t>(y - ylo)] = acc;
            }
            x = ylo + static_cast<int>(rng.draw_index(cdf));
            out.heights[static_cast<std::size_t>(k + 1)] = x;
        }
        return out;
    }

    // (L, R) from the exact wedge
    std::size_t cell = rng.draw_index(wet_cdf_);
    auto [l, r] = wet_cells_[cell];

    // descending ramp on [0, l]
    std::vector<int> down = sample_ramp(l, false, rng);
    for (int k = 0; k <= l; ++k) out.heights[static_cast<std::size_t>(k)] = down[static_cast<std::size_t>(k)];

    // ascending ramp on [r, N]: time-reversed descent under the mirrored law
    std::vector<int> up = sample_ramp(N_ - r, true, rng);
    for (int j = 0; j <= N_ - r; ++j)
        out.heights[static_cast<std::size_t>(r + j)] = up[static_cast<std::size_t>(N_ - r - j)];

    // wetted stretch [l, r]: conditioned renewal contacts + excursions
    out.contacts.push_back(l);
    if (r > l) {
        std::vector<int> mids = sample_contacts(tilted_, r - l, rng);
        int prev = 0;
        for (int c : mids) {
            int gap = c - prev;
            if (gap > 1) {
                std::vector<int> exc = excursions_.sample(gap, rng);
                for (int j = 1; j < gap; ++j)
                    out.heights[static_cast<std::size_t>(l + prev + j)] =
                        -A + exc[static_cast<std::size_t>(j)];
            }
            out.heights[static_cast<std::size_t>(l + c)] = -A;
            out.contacts.push_back(l + c);
            prev = c;
        }
    }
    return out;
}

}  // namespace wetting
