#pragma once

#include <array>
#include <cstdint>

namespace d2dcache {

/// Serving tier of one user in one realization.
enum class Tier { SelfCache, MmWave, Microwave, BaseStation, Outage };

inline constexpr int kTierCount = 5;

/// One (mean-min-throughput, outage) sample of a scheme.
struct SchemePoint {
    double t_min_bps = 0.0;
    double p_o = 1.0;
    std::array<std::int64_t, kTierCount> tiers{}; ///< users per Tier, summed over realizations

    friend bool operator==(const SchemePoint&, const SchemePoint&) = default;
};

} // namespace d2dcache
