#pragma once

// Exact-table Monte Carlo for wetting and well trajectories: contacts from the
// conditioned tilted renewal, excursions and ramps by sequential draws against
// backward DP masses (h-transform), so every sampler factorizes an exact law.
// Determinism: all draws are inverse-CDF reads of 64-bit counter-based
// uniforms; parallel paths use disjoint (seed, path index) streams.

#include <cstdint>
#include <map>
#include <mutex>
#include <vector>

#include "wetting/exact.hpp"

namespace wetting {

struct PathSample {
    std::vector<int> heights;   // S_0..S_N
    std::vector<int> contacts;  // times n >= 1 with S_n at the well bottom
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

// Renewal times in [1, N] of the tilted renewal conditioned on N being a
// renewal; the returned set always contains N.
std::vector<int> sample_contacts(const TiltedRenewal& tilted, int N, Rng& rng);

// Positive excursion bridge: 0 -> 0 of length n, strictly positive inside.
class ExcursionSampler {
public:
    explicit ExcursionSampler(const IncrementLaw& law) : law_(law) {}
    std::vector<int> sample(int n, Rng& rng) const;

private:
    struct Table {
        // mass[k][x-1] = P(from x at step k: interior stays > 0, ends at 0)
        std::vector<std::vector<double>> mass;
        std::vector<int> cap;
    };
    const Table& table_for(int n) const;

    IncrementLaw law_;
    mutable std::mutex mutex_;
    mutable std::map<int, Table> cache_;
};

std::vector<int> sample_excursion(const IncrementLaw& law, int n, Rng& rng);

// Full well-path sampler at fixed (lambda, a, N): draws dry/wet and (L, R)
// from the exact joint law, fills the ramps by first-passage h-transforms and
// the wetted stretch by conditioned renewal gaps plus excursions.
class WellPathSampler {
public:
    WellPathSampler(const WellModel& model, double lambda, double a, int N);

    // Deterministic in (seed, path_index); thread-safe (table caches locked).
    PathSample sample(std::uint64_t seed, std::uint64_t path_index = 0) const;

    const LrLaw& lr_law() const { return lr_; }
    const TiltedRenewal& tilted() const { return tilted_; }
    int depth() const { return lr_.A; }

private:
    struct RampTable {
        // mass[k][i]: backward mass at height (lo + i) after k of n steps
        std::vector<std::vector<double>> mass;
        int lo = 0;
    };
    const RampTable& ramp_for(int len, bool mirrored) const;
    void ensure_dry_table() const;

    // descending first-passage ramp 0 -> -A of length len (> -A before the end)
    std::vector<int> sample_ramp(int len, bool mirrored, Rng& rng) const;

    const WellModel& model_;
    double lambda_, a_;
    int N_;
    LrLaw lr_;
    TiltedRenewal tilted_;
    ExcursionSampler excursions_;

    // flattened wet-cell CDF over the (l, r) wedge
    std::vector<double> wet_cdf_;
    std::vector<std::pair<int, int>> wet_cells_;
    double wet_total_weight_ = 0.0;

    mutable std::mutex mutex_;
    mutable std::map<std::pair<int, bool>, RampTable> ramp_cache_;
    mutable std::vector<std::vector<double>> dry_table_;  // built on first dry draw
    mutable int dry_lo_ = 0;
};

}  // namespace wetting
