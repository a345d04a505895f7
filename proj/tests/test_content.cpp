#include "d2dcache/content.hpp"
#include "d2dcache/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

using namespace d2dcache;

namespace {

double hit(const std::vector<double>& q, const std::vector<double>& p, double slots)
{
    double h = 0.0;
    for (std::size_t f = 0; f < q.size(); ++f) {
        h += p[f] * (1.0 - std::pow(1.0 - q[f], slots));
    }
    return h;
}

// Best hit probability over the simplex grid with the given step count.
double grid_search(const std::vector<double>& p, double slots, int steps)
{
    const std::size_t m = p.size();
    std::vector<int> k(m, 0);
    std::vector<double> q(m);
    double best = 0.0;
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
        if (i + 1 == m) {
            k[i] = left;
            for (std::size_t f = 0; f < m; ++f) {
                q[f] = static_cast<double>(k[f]) / steps;
            }
            best = std::max(best, hit(q, p, slots));
            return;
        }
        for (int a = 0; a <= left; ++a) {
            k[i] = a;
            rec(i + 1, left - a);
        }
    };
    rec(0, steps);
    return best;
}

} // namespace

TEST_CASE("zipf pmf")
{
    const ZipfDemand d = zipf_pmf(3, 0.4);
    CHECK(d.p(1) == doctest::Approx(0.416276).epsilon(1e-5));
    CHECK(d.p(2) == doctest::Approx(0.315478).epsilon(1e-5));
    CHECK(d.p(3) == doctest::Approx(0.268246).epsilon(1e-5));
    CHECK(d.tail(0) == 1.0);
    CHECK(d.tail(1) == doctest::Approx(1.0 - 0.416276).epsilon(1e-5));
    CHECK(d.tail(3) == 0.0);

    const ZipfDemand u = zipf_pmf(10, 0.0);
    for (double x : u.pmf) {
        CHECK(x == doctest::Approx(0.1));
    }
    const ZipfDemand big = zipf_pmf(300, 0.8);
    CHECK(std::accumulate(big.pmf.begin(), big.pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::is_sorted(big.pmf.rbegin(), big.pmf.rend()));
    CHECK_THROWS(zipf_pmf(0, 0.4));
    CHECK_THROWS(zipf_pmf(10, 1.0));
}

TEST_CASE("caching distribution normalizes over random tuples")
{
    StreamEngine rng = make_stream(2024, StreamTag::Caches);
    std::uniform_int_distribution<int> mdist(1, 50);
    std::uniform_int_distribution<int> Mdist(1, 5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int m = mdist(rng);
        const int M = Mdist(rng);
        const double gamma = 1e-6 + unit(rng) * (1.0 - 2e-6);
        const double g_c = 1.0 + 1.0 / M + unit(rng) * (19.0 - 1.0 / M);
        const CachingDistribution c = optimal_cache_distribution(zipf_pmf(m, gamma), M, g_c);
        const double s = std::accumulate(c.pc.begin(), c.pc.end(), 0.0);
        CHECK(std::abs(s - 1.0) < 1e-9);
        for (double x : c.pc) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        CHECK(std::is_sorted(c.pc.rbegin(), c.pc.rend()));
    }
}

TEST_CASE("caching distribution beats a simplex grid search")
{
    for (int m = 1; m <= 4; ++m) {
        for (double g_c : {2.0, 3.0, 4.0}) {
            for (double gamma : {0.2, 0.4, 0.8}) {
                const ZipfDemand d = zipf_pmf(m, gamma);
                const CachingDistribution c = optimal_cache_distribution(d, 1, g_c);
                const double opt = cluster_hit_probability(c, d);
                CHECK(opt >= grid_search(d.pmf, g_c - 1.0, 50) - 1e-6);
            }
        }
    }
}

TEST_CASE("caching distribution is a stationary point")
{
    // on the support the marginal gain p_f s (1 - q_f)^(s - 1) is constant
    const ZipfDemand d = zipf_pmf(40, 0.6);
    const int M = 3;
    const double g_c = 4.5;
    const double s = M * (g_c - 1.0);
    const CachingDistribution c = optimal_cache_distribution(d, M, g_c);
    REQUIRE(c.support > 1);
    const double ref = d.p(1) * std::pow(1.0 - c.p(1), s - 1.0);
    for (int f = 2; f <= c.support; ++f) {
        CHECK(d.p(f) * std::pow(1.0 - c.p(f), s - 1.0) == doctest::Approx(ref).epsilon(1e-9));
    }
    for (int f = c.support + 1; f <= d.m; ++f) {
        CHECK(c.p(f) == 0.0);
        CHECK(d.p(f) <= ref + 1e-15);
    }
}

TEST_CASE("caching distribution edge cases")
{
    const ZipfDemand d = zipf_pmf(20, 0.5);
    const CachingDistribution lin = optimal_cache_distribution(d, 1, 2.0);
    CHECK(lin.support == 1);
    CHECK(lin.p(1) == 1.0);
    const CachingDistribution nc = optimal_cache_distribution(d, 2, 1.0, ExponentMode::NeighborCount);
    CHECK(nc.p(1) == 1.0);
    CHECK_THROWS_AS(optimal_cache_distribution(d, 1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(optimal_cache_distribution(d, 0, 3.0), std::invalid_argument);
    // huge cluster: support grows to the whole library
    const CachingDistribution wide = optimal_cache_distribution(d, 5, 500.0);
    CHECK(wide.support == 20);
    CHECK(parse_exponent_mode(to_string(ExponentMode::NeighborCount)) == ExponentMode::NeighborCount);
}

TEST_CASE("hit probability matches Monte Carlo over neighbor caches")
{
    const ZipfDemand d = zipf_pmf(30, 0.4);
    const int M = 2;
    const int neighbors = 4;
    const CachingDistribution c = optimal_cache_distribution(d, M, neighbors + 1.0);
    StreamEngine rng = make_stream(8, StreamTag::Requests);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&](const std::vector<double>& w) {
        double u = unit(rng);
        for (std::size_t f = 0; f < w.size(); ++f) {
            u -= w[f];
            if (u < 0.0) {
                return static_cast<int>(f);
            }
        }
        return static_cast<int>(w.size()) - 1;
    };
    const int N = 200000;
    int hits = 0;
    for (int t = 0; t < N; ++t) {
        const int req = draw(d.pmf);
        bool found = false;
        // each of the M (g_c - 1) neighbor slots is an independent draw from pc
        for (int slot = 0; slot < M * neighbors && !found; ++slot) {
            found = draw(c.pc) == req;
        }
        hits += found ? 1 : 0;
    }
    const double est = static_cast<double>(hits) / N;
    const double exact = cluster_hit_probability(c, d);
    CHECK(std::abs(est - exact) < 4.0 * std::sqrt(exact * (1 - exact) / N));
}

TEST_CASE("cache placement")
{
    const ZipfDemand d = zipf_pmf(100, 0.4);
    const CachingDistribution c = optimal_cache_distribution(d, 5, 40.0);
    REQUIRE(c.support >= 5);
    const int n = 4000;
    const CacheAssignment a = place_caches(c, n, 5, 77);
    const CacheAssignment b = place_caches(c, n, 5, 77);
    CHECK(a.files == b.files);
    std::vector<int> count(101, 0);
    for (int i = 0; i < n; ++i) {
        std::set<int> s(a.begin(i), a.end(i));
        CHECK(s.size() == 5);
        CHECK(std::is_sorted(a.begin(i), a.end(i)));
        for (const int* f = a.begin(i); f != a.end(i); ++f) {
            CHECK(c.p(*f) > 0.0);
            CHECK(a.holds(i, *f));
            ++count[*f];
        }
    }
    // with one draw per node the per-file frequency is pc; with M draws the
    // most popular file is at least as frequent as under pc alone
    CHECK(count[1] / double(n) >= c.p(1) - 0.03);
    CHECK(count[1] >= count[c.support]);

    const CacheAssignment one = place_caches(c, 20000, 1, 5);
    for (int f = 1; f <= 10; ++f) {
        const double freq = std::count(one.files.begin(), one.files.end(), f) / 20000.0;
        CHECK(std::abs(freq - c.p(f)) < 4.0 * std::sqrt(c.p(f) * (1 - c.p(f)) / 20000.0) + 1e-12);
    }
    CHECK_THROWS(place_caches(c, 10, c.support + 1, 1));
}

TEST_CASE("request sampling follows the pmf")
{
    const ZipfDemand d = zipf_pmf(20, 0.8);
    const int n = 100000;
    const std::vector<int> r = sample_requests(d, n, 3);
    CHECK(r == sample_requests(d, n, 3));
    for (int f = 1; f <= 20; ++f) {
        const double freq = std::count(r.begin(), r.end(), f) / double(n);
        CHECK(std::abs(freq - d.p(f)) < 4.0 * std::sqrt(d.p(f) * (1 - d.p(f)) / n));
    }
}
