#include "d2dcache/bs_schemes.hpp"
#include "d2dcache/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace d2dcache;

namespace {

BsLinkLaw simple_law(double median, double sigma)
{
    BsLinkLaw law;
    law.components.push_back({1.0, median, sigma});
    law.eirp_dbm = 30.0;
    law.bandwidth_hz = 5e6;
    law.noise_dbm = noise_power_dbm(law.bandwidth_hz);
    return law;
}

} // namespace

TEST_CASE("coded multicasting transmissions")
{
    CHECK(coded_multicast_ntx(2, 3, 1.5) == 0.5);
    CHECK(coded_multicast_ntx(4, 2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(coded_multicast_ntx(3, 3, 1.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(coded_multicast_ntx(7, 10, 0) == 7.0);
    // convex and decreasing in M
    double prev = coded_multicast_ntx(50, 20, 0);
    for (double M = 0.25; M < 20; M += 0.25) {
        const double cur = coded_multicast_ntx(50, 20, M);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK_THROWS(coded_multicast_ntx(5, 3, 3));
}

TEST_CASE("harmonic plan")
{
    const HarmonicPlan p = harmonic_plan_from_blocks(1.0, 4);
    CHECK(p.factor == doctest::Approx(25.0 / 12.0).epsilon(1e-15));
    CHECK(harmonic_plan_from_blocks(2.7e9, 540).factor == doctest::Approx(6.86971044).epsilon(1e-9));
    CHECK(harmonic_plan(10.0, 3.0).blocks == 4);
    CHECK(harmonic_plan(9.0, 3.0).blocks == 3);
    CHECK(harmonic_broadcast_set(25.0 / 12.0 * 3.0, 1.0, p, 10) == 3);
    CHECK(harmonic_broadcast_set(1e9, 1.0, p, 10) == 10);
    CHECK(harmonic_broadcast_set(1.0, 1.0, p, 10) == 0);
}

TEST_CASE("link law tail and quantile are consistent")
{
    const BsLinkLaw law = simple_law(110.0, 8.0);
    CHECK(law.pathloss_exceedance(110.0) == doctest::Approx(0.5));
    CHECK(law.pathloss_exceedance(118.0) == doctest::Approx(0.158655).epsilon(1e-5));
    for (double p : {0.01, 0.05, 0.3, 0.7}) {
        const double c = law.rate_quantile(p);
        CHECK(law.outage_probability(c) == doctest::Approx(p).epsilon(1e-6));
    }
    CHECK(law.capacity_at(law.pathloss_threshold(1e6)) == doctest::Approx(1e6).epsilon(1e-9));
}

TEST_CASE("link law sampling matches the closed form")
{
    BsLinkLaw law = simple_law(110.0, 8.0);
    law.components = {{0.3, 100.0, 5.0}, {0.7, 120.0, 9.0}};
    law.floor_db = 95.0;
    StreamEngine rng = make_stream(4, StreamTag::BsMonteCarlo);
    const int N = 200000;
    const double rate = law.capacity_at(115.0);
    int below = 0;
    for (int i = 0; i < N; ++i) {
        below += law.sample_capacity(rng) < rate ? 1 : 0;
    }
    const double p = law.outage_probability(rate);
    CHECK(std::abs(below / double(N) - p) < 4.0 * std::sqrt(p * (1 - p) / N));
}

TEST_CASE("unicast tradeoff")
{
    std::vector<BsLinkLaw> laws(400, simple_law(105.0, 6.0));
    const std::vector<double> grid{0.05, 0.2};
    const auto pts = unicast_tradeoff(laws, 0, 300, grid, 9);
    REQUIRE(pts.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const auto served = pts[k].tiers[static_cast<int>(Tier::BaseStation)];
        CHECK(served + pts[k].tiers[static_cast<int>(Tier::Outage)] == 400);
        // identical users share equally: T = C / served
        CHECK(pts[k].t_min_bps ==
              doctest::Approx(laws[0].rate_quantile(grid[k]) / served).epsilon(1e-12));
        CHECK(std::abs(served / 400.0 - (1 - grid[k])) < 4 * std::sqrt(grid[k] * (1 - grid[k]) / 400));
    }
    const auto cached = unicast_tradeoff(laws, 150, 300, grid, 9);
    CHECK(cached[0].t_min_bps == doctest::Approx(2.0 * pts[0].t_min_bps));
    // doubling the user population roughly halves T
    std::vector<BsLinkLaw> twice(800, laws[0]);
    const auto big = unicast_tradeoff(twice, 0, 300, grid, 9);
    CHECK(big[0].t_min_bps / pts[0].t_min_bps == doctest::Approx(0.5).epsilon(0.05));
    CHECK_THROWS(unicast_tradeoff(laws, 300, 300, grid, 9));
}

TEST_CASE("multicast outage")
{
    std::vector<BsLinkLaw> laws{simple_law(100.0, 6.0), simple_law(115.0, 6.0)};
    const std::vector<double> grid{laws[1].capacity_at(115.0), 1.0};
    const MulticastOutage o = multicast_outage(laws, grid, 20000, 3);
    CHECK(o.worst[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(o.per_user[0][1] - 0.5) < 0.02);
    CHECK(o.per_user[0][0] < o.per_user[0][1]);
    CHECK(o.worst[1] < 1e-6);

    const auto coded = coded_multicast_tradeoff(laws, 10, 1.0, grid, 20000, 3);
    const double ntx = coded_multicast_ntx(2, 10, 1.0);
    CHECK(coded[0].t_min_bps == doctest::Approx(grid[0] / ntx * 0.5).epsilon(1e-9));
    CHECK(coded[0].p_o == doctest::Approx((o.per_user[0][0] + o.per_user[0][1]) / 2));
    const auto served =
        coded_multicast_tradeoff(laws, 10, 1.0, grid, 20000, 3, ThroughputMode::ServedMean);
    CHECK(served[0].t_min_bps == doctest::Approx(grid[0] / ntx));
}

TEST_CASE("harmonic tradeoff")
{
    std::vector<BsLinkLaw> laws(3, simple_law(90.0, 4.0));
    const ZipfDemand d = zipf_pmf(4, 0.4);
    const HarmonicPlan plan = harmonic_plan_from_blocks(1.0, 4);
    const double R = 1e3;
    const std::vector<double> grid{R * plan.factor * 2.0, R};
    const auto pts = harmonic_tradeoff(laws, d, plan, R, grid, 1000, 1);
    // two files broadcast: requests for files 3 and 4 miss
    CHECK(pts[0].p_o == doctest::Approx(d.tail(2)).epsilon(1e-6));
    CHECK(pts[0].t_min_bps == doctest::Approx(R * (1 - d.tail(2))).epsilon(1e-6));
    CHECK(pts[1].t_min_bps == 0.0);
    CHECK(pts[1].p_o == doctest::Approx(1.0));
}

TEST_CASE("base-station link law from the channel")
{
    const ChannelModel ch;
    const CellLayout L = build_layout(Environment::Office, 600.0);
    const BandConfig cell = BandConfig::defaults(Band::Cellular2_1);
    const BsLinkLaw near = bs_link_law(ch, L, Point{300.0, 320.0}, cell);
    const BsLinkLaw far = bs_link_law(ch, L, Point{3.0, 3.0}, cell);
    CHECK(near.bandwidth_hz == doctest::Approx(cell.bandwidth_hz / cell.reuse));
    double wsum = 0.0;
    for (const auto& c : far.components) {
        wsum += c.weight;
    }
    CHECK(wsum == doctest::Approx(1.0));
    CHECK(near.rate_quantile(0.1) > far.rate_quantile(0.1));
    CHECK_THROWS(bs_link_law(ch, L, Point{1, 1}, BandConfig::defaults(Band::Ism2_45)));
}
