#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace d2dcache {

/// Zipf request distribution over files 1..m. Index 0 of the vectors is file 1.
struct ZipfDemand {
    int m = 0;
    double gamma = 0.0;
    std::vector<double> pmf;
    std::vector<double> cdf;

    double p(int file) const { return pmf[file - 1]; }
    /// Mass of files with id > k.
    double tail(int k) const;
};

/// P_r(f) = f^-gamma / sum_i i^-gamma. gamma must lie in [0, 1).
ZipfDemand zipf_pmf(int m, double gamma);

/**
 * Exponent used in z_f = P_r(f)^(1/e).
 *
 * Paper: e = M(g_c - 1) - 1, the stationarity condition of the hit objective.
 * NeighborCount: e = M(g_c - 1), the raw number of neighbor cache slots.
 */
enum class ExponentMode { Paper, NeighborCount };

std::string_view to_string(ExponentMode mode);
ExponentMode parse_exponent_mode(std::string_view text);

struct CachingDistribution {
    std::vector<double> pc; ///< per-file probability, file f at index f-1
    std::vector<double> z;  ///< z_f (may underflow to 0 for extreme exponents)
    double nu = 0.0;        ///< water level
    int support = 0;        ///< m*: pc is zero beyond this file
    int M = 0;
    double g_c = 0.0;
    ExponentMode mode = ExponentMode::Paper;

    double p(int file) const { return pc[file - 1]; }
};

/**
 * Water-filling caching distribution P_c(f) = [1 - nu/z_f]^+ maximizing the
 * probability that a request is found among the M(g_c - 1) neighbor cache
 * slots of a cluster.
 *
 * g_c may be fractional (expected cluster population). When the exponent is
 * exactly zero the objective is linear and the mass goes to the most popular
 * file(s). Throws std::invalid_argument for M < 1, g_c < 2 with a negative
 * exponent, or an empty demand.
 */
CachingDistribution optimal_cache_distribution(const ZipfDemand& demand, int M, double g_c,
                                               ExponentMode mode = ExponentMode::Paper);

/// Sum_f P_r(f) (1 - (1 - q_f)^(M(g_c-1))) for an arbitrary caching pmf q.
double cluster_hit_probability(const std::vector<double>& q, const ZipfDemand& demand, int M,
                               double g_c);
double cluster_hit_probability(const CachingDistribution& dist, const ZipfDemand& demand);

/// Per-node caches, M distinct files each, stored contiguously and sorted.
struct CacheAssignment {
    int n = 0;
    int M = 0;
    std::vector<int> files; ///< node i holds files[i*M .. i*M+M)

    const int* begin(int node) const { return files.data() + static_cast<std::size_t>(node) * M; }
    const int* end(int node) const { return begin(node) + M; }
    bool holds(int node, int file) const;
};

/**
 * Every node draws M distinct files from pc without replacement (each draw
 * renormalizes over the files not yet taken). Node i uses its own stream
 * keyed by (seed, i). Throws if M exceeds the support of pc.
 */
CacheAssignment place_caches(const CachingDistribution& dist, int n, int M, std::uint64_t seed);
CacheAssignment place_caches(const std::vector<double>& pc, int n, int M, std::uint64_t seed);

/// i.i.d. requests from the demand; node i uses the stream keyed by (seed, i).
std::vector<int> sample_requests(const ZipfDemand& demand, int n, std::uint64_t seed);

} // namespace d2dcache
