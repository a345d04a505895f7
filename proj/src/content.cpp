#include "d2dcache/content.hpp"

#include "d2dcache/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace d2dcache {

std::string_view to_string(ExponentMode mode)
{
    return mode == ExponentMode::Paper ? "paper" : "neighbor_count";
}

ExponentMode parse_exponent_mode(std::string_view text)
{
    if (text == "paper") {
        return ExponentMode::Paper;
    }
    if (text == "neighbor_count") {
        return ExponentMode::NeighborCount;
    }
    throw std::invalid_argument("unknown exponent mode '" + std::string(text) + "'");
}

double ZipfDemand::tail(int k) const
{
    if (k <= 0) {
        return 1.0;
    }
    if (k >= m) {
        return 0.0;
    }
    return std::max(0.0, 1.0 - cdf[k - 1]);
}

ZipfDemand zipf_pmf(int m, double gamma)
{
    if (m < 1) {
        throw std::invalid_argument("zipf_pmf: m must be positive");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("zipf_pmf: gamma must be in [0, 1)");
    }
    ZipfDemand d;
    d.m = m;
    d.gamma = gamma;
    d.pmf.resize(m);
    double sum = 0.0;
    for (int f = 1; f <= m; ++f) {
        d.pmf[f - 1] = std::pow(static_cast<double>(f), -gamma);
    }
    // sum from the small end for accuracy
    for (int f = m; f >= 1; --f) {
        sum += d.pmf[f - 1];
    }
    d.cdf.resize(m);
    double acc = 0.0;
    for (int f = 0; f < m; ++f) {
        d.pmf[f] /= sum;
        acc += d.pmf[f];
        d.cdf[f] = acc;
    }
    d.cdf[m - 1] = 1.0;
    return d;
}

CachingDistribution optimal_cache_distribution(const ZipfDemand& demand, int M, double g_c,
                                               ExponentMode mode)
{
    const int m = demand.m;
    if (m < 1) {
        throw std::invalid_argument("optimal_cache_distribution: empty demand");
    }
    if (M < 1) {
        throw std::invalid_argument("optimal_cache_distribution: M must be at least 1");
    }
    const double slots = M * (g_c - 1.0);
    const double e = mode == ExponentMode::Paper ? slots - 1.0 : slots;
    if (!(e >= 0.0)) {
        throw std::invalid_argument("optimal_cache_distribution: M(g_c-1) = " +
                                    std::to_string(slots) +
                                    " leaves the exponent undefined; need a larger cluster");
    }

    CachingDistribution out;
    out.M = M;
    out.g_c = g_c;
    out.mode = mode;
    out.pc.assign(m, 0.0);
    out.z.assign(m, 0.0);

    std::vector<double> logp(m);
    for (int f = 0; f < m; ++f) {
        logp[f] = std::log(demand.pmf[f]);
    }

    if (e == 0.0) {
        // linear objective: all mass on the most popular file(s)
        int ties = 1;
        while (ties < m && demand.pmf[ties] == demand.pmf[0]) {
            ++ties;
        }
        for (int f = 0; f < ties; ++f) {
            out.pc[f] = 1.0 / ties;
            out.z[f] = 1.0;
        }
        out.support = ties;
        out.nu = 0.0;
        return out;
    }

    for (int f = 0; f < m; ++f) {
        out.z[f] = std::exp(logp[f] / e);
    }

    // Scan supports from the largest down; with z non-increasing, feasibility of
    // support k is decided by its last coordinate. All ratios are taken relative
    // to z_k so nothing overflows.
    int k = m;
    double level = 0.0; // nu / z_k
    for (; k >= 1; --k) {
        double s = 0.0;
        for (int f = 0; f < k; ++f) {
            s += std::exp((logp[k - 1] - logp[f]) / e);
        }
        if (s >= k - 1) {
            level = (k - 1) / s;
            break;
        }
    }
    out.support = k;
    for (int f = 0; f < k; ++f) {
        out.pc[f] = std::max(0.0, 1.0 - level * std::exp((logp[k - 1] - logp[f]) / e));
    }
    out.nu = level * out.z[k - 1];
    return out;
}

double cluster_hit_probability(const std::vector<double>& q, const ZipfDemand& demand, int M,
                               double g_c)
{
    if (q.size() != demand.pmf.size()) {
        throw std::invalid_argument("cluster_hit_probability: size mismatch");
    }
    const double slots = M * (g_c - 1.0);
    if (slots <= 0.0) {
        return 0.0;
    }
    double hit = 0.0;
    for (std::size_t f = 0; f < q.size(); ++f) {
        hit += demand.pmf[f] * (1.0 - std::pow(1.0 - q[f], slots));
    }
    return hit;
}

double cluster_hit_probability(const CachingDistribution& dist, const ZipfDemand& demand)
{
    return cluster_hit_probability(dist.pc, demand, dist.M, dist.g_c);
}

bool CacheAssignment::holds(int node, int file) const
{
    return std::binary_search(begin(node), end(node), file);
}

CacheAssignment place_caches(const CachingDistribution& dist, int n, int M, std::uint64_t seed)
{
    return place_caches(dist.pc, n, M, seed);
}

CacheAssignment place_caches(const std::vector<double>& pc, int n, int M, std::uint64_t seed)
{
    const int m = static_cast<int>(pc.size());
    if (n < 0 || M < 0) {
        throw std::invalid_argument("place_caches: negative n or M");
    }
    if (M > m) {
        throw std::invalid_argument("place_caches: M exceeds the library size");
    }
    std::vector<int> support;
    for (int f = 0; f < m; ++f) {
        if (pc[f] > 0.0) {
            support.push_back(f);
        }
    }
    if (M > static_cast<int>(support.size())) {
        throw std::invalid_argument(
            "place_caches: M = " + std::to_string(M) + " exceeds the caching support of " +
            std::to_string(support.size()) +
            " files; increase the cluster size so more files get positive probability");
    }

    CacheAssignment out;
    out.n = n;
    out.M = M;
    out.files.resize(static_cast<std::size_t>(n) * M);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> w(support.size());
    for (int node = 0; node < n; ++node) {
        StreamEngine rng = make_stream(seed, StreamTag::Caches, static_cast<std::uint64_t>(node));
        double total = 0.0;
        for (std::size_t i = 0; i < support.size(); ++i) {
            w[i] = pc[support[i]];
            total += w[i];
        }
        int* slot = out.files.data() + static_cast<std::size_t>(node) * M;
        for (int j = 0; j < M; ++j) {
            const double u = unif(rng) * total;
            double acc = 0.0;
            std::size_t pick = support.size();
            std::size_t last_live = 0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (w[i] <= 0.0) {
                    continue;
                }
                last_live = i;
                acc += w[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == support.size()) {
                pick = last_live; // rounding at the top of the range
            }
            slot[j] = support[pick] + 1;
            total -= w[pick];
            w[pick] = 0.0;
            if (total <= 0.0) {
                // recompute to shed accumulated rounding
                total = 0.0;
                for (double x : w) {
                    total += x;
                }
            }
        }
        std::sort(slot, slot + M);
    }
    return out;
}

std::vector<int> sample_requests(const ZipfDemand& demand, int n, std::uint64_t seed)
{
    std::vector<int> out(n);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        StreamEngine rng = make_stream(seed, StreamTag::Requests, static_cast<std::uint64_t>(i));
        const double u = unif(rng);
        auto it = std::upper_bound(demand.cdf.begin(), demand.cdf.end(), u);
        out[i] = static_cast<int>(std::min<std::ptrdiff_t>(it - demand.cdf.begin(), demand.m - 1)) + 1;
    }
    return out;
}

} // namespace d2dcache
