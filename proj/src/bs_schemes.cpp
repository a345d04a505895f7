#include "d2dcache/bs_schemes.hpp"

#include "d2dcache/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace d2dcache {

namespace {

double gaussian_tail(double x)
{
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

} // namespace

double BsLinkLaw::pathloss_exceedance(double pl_db) const
{
    if (pl_db < floor_db) {
        return 1.0;
    }
    double p = 0.0;
    for (const auto& c : components) {
        if (c.sigma_db > 0.0) {
            p += c.weight * gaussian_tail((pl_db - c.median_db) / c.sigma_db);
        } else if (c.median_db > pl_db) {
            p += c.weight;
        }
    }
    return std::clamp(p, 0.0, 1.0);
}

double BsLinkLaw::pathloss_threshold(double rate_bps) const
{
    // C < c  <=>  SNR < 2^(c/B) - 1  <=>  PL > eirp - noise - 10 log10(2^(c/B) - 1)
    const double snr = std::expm1(rate_bps / bandwidth_hz * std::numbers::ln2);
    return eirp_dbm - noise_dbm - 10.0 * std::log10(snr);
}

double BsLinkLaw::capacity_at(double pl_db) const
{
    const double snr_db = eirp_dbm - pl_db - noise_dbm;
    return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

double BsLinkLaw::outage_probability(double rate_bps) const
{
    if (rate_bps <= 0.0) {
        return 0.0;
    }
    return pathloss_exceedance(pathloss_threshold(rate_bps));
}

double BsLinkLaw::rate_quantile(double p) const
{
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("rate_quantile: p must be in (0, 1)");
    }
    // exceedance is non-increasing in the pathloss threshold t; find t with exceedance p
    double lo = floor_db;
    if (!std::isfinite(lo)) {
        lo = 1e300;
        for (const auto& c : components) {
            lo = std::min(lo, c.median_db - 40.0 * c.sigma_db - 1.0);
        }
    }
    if (pathloss_exceedance(lo) <= p) {
        return capacity_at(lo);
    }
    double hi = lo + 1.0;
    for (const auto& c : components) {
        hi = std::max(hi, c.median_db + 40.0 * c.sigma_db + 1.0);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double e = pathloss_exceedance(mid);
        if (std::abs(e - p) < 1e-9 && hi - lo < 1e-6) {
            lo = hi = mid;
            break;
        }
        if (e > p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12) {
            break;
        }
    }
    return capacity_at(0.5 * (lo + hi));
}

BsLinkLaw bs_link_law(const ChannelModel& channel, const CellLayout& layout, Point user,
                      const BandConfig& cellular)
{
    if (cellular.band != Band::Cellular2_1) {
        throw std::invalid_argument("bs_link_law: needs the cellular band");
    }
    const LinkGeometry g = classify_link(layout, Endpoint{layout.bs_position, EndpointKind::BaseStation},
                                         Endpoint{user, EndpointKind::Device});
    BsLinkLaw law;
    law.eirp_dbm = cellular.eirp_dbm();
    law.bandwidth_hz = cellular.bandwidth_hz / std::max(1, cellular.reuse);
    law.noise_dbm = noise_power_dbm(law.bandwidth_hz, channel.noise_figure_db());
    const double p_los = los_probability(g.scenario, layout.environment, g.distance);
    for (LinkState s : {LinkState::LOS, LinkState::NLOS}) {
        const double w = s == LinkState::LOS ? p_los : 1.0 - p_los;
        if (w <= 0.0) {
            continue;
        }
        const auto m = channel.model(layout.environment, g, s, cellular, false);
        if (!m) {
            continue;
        }
        const double body = channel.body().sigma(LinkKind::BaseStation, s);
        law.components.push_back({w, m->median_db, std::hypot(m->sigma_db, body)});
        law.floor_db = m->floor_db;
    }
    if (law.components.empty()) {
        throw std::logic_error("bs_link_law: no usable link state");
    }
    return law;
}

std::vector<BsLinkLaw> bs_link_laws(const ChannelModel& channel, const CellLayout& layout,
                                    const NodePlacement& placement, const BandConfig& cellular)
{
    std::vector<BsLinkLaw> out;
    out.reserve(placement.size());
    for (const auto& p : placement.positions) {
        out.push_back(bs_link_law(channel, layout, p, cellular));
    }
    return out;
}

std::string_view to_string(ThroughputMode mode)
{
    return mode == ThroughputMode::WorstCase ? "worst_case" : "served_mean";
}

ThroughputMode parse_throughput_mode(std::string_view text)
{
    if (text == "worst_case") {
        return ThroughputMode::WorstCase;
    }
    if (text == "served_mean") {
        return ThroughputMode::ServedMean;
    }
    throw std::invalid_argument("unknown throughput mode '" + std::string(text) + "'");
}

std::vector<SchemePoint> unicast_tradeoff(const std::vector<BsLinkLaw>& laws, int M, int m,
                                          const std::vector<double>& p_o_grid, std::uint64_t seed)
{
    if (m < 1 || M < 0 || M >= m) {
        throw std::invalid_argument("unicast_tradeoff: need 0 <= M < m");
    }
    const double caching_gain = 1.0 / (1.0 - static_cast<double>(M) / m);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<SchemePoint> out;
    for (std::size_t k = 0; k < p_o_grid.size(); ++k) {
        const double p = p_o_grid[k];
        SchemePoint pt;
        pt.p_o = p;
        double inv_sum = 0.0;
        std::int64_t served = 0;
        for (std::size_t u = 0; u < laws.size(); ++u) {
            StreamEngine rng = make_stream(seed, StreamTag::BsMonteCarlo, u, k, 1);
            if (unif(rng) < p) {
                continue;
            }
            const double c = laws[u].rate_quantile(p);
            if (c <= 0.0) {
                continue;
            }
            inv_sum += 1.0 / c;
            ++served;
        }
        pt.tiers[static_cast<int>(Tier::BaseStation)] = served;
        pt.tiers[static_cast<int>(Tier::Outage)] = static_cast<std::int64_t>(laws.size()) - served;
        pt.t_min_bps = served > 0 ? caching_gain / inv_sum : 0.0;
        if (served == 0) {
            pt.p_o = 1.0;
        }
        out.push_back(pt);
    }
    return out;
}

double coded_multicast_ntx(double n, double m, double M)
{
    if (!(n >= 1.0) || !(m > 0.0) || M < 0.0) {
        throw std::invalid_argument("coded_multicast_ntx: need n >= 1, m > 0, M >= 0");
    }
    if (M >= m) {
        throw std::invalid_argument("coded_multicast_ntx: M must be smaller than m");
    }
    auto at_integer = [&](double t) { // t = M n / m integer
        const double Mi = t * m / n;
        return n * (1.0 - Mi / m) / (1.0 + t);
    };
    const double t = M * n / m;
    const double lo = std::floor(t);
    const double hi = std::ceil(t);
    if (hi - lo < 0.5 || std::abs(t - std::round(t)) < 1e-12) {
        return at_integer(std::round(t));
    }
    const double w = t - lo; // linear in M at fixed n, m
    return (1.0 - w) * at_integer(lo) + w * at_integer(hi);
}

MulticastOutage multicast_outage(const std::vector<BsLinkLaw>& laws,
                                 const std::vector<double>& c_r0_grid, int samples,
                                 std::uint64_t seed)
{
    if (samples < 1) {
        throw std::invalid_argument("multicast_outage: samples must be positive");
    }
    MulticastOutage out;
    out.per_user.assign(c_r0_grid.size(), std::vector<double>(laws.size(), 0.0));
    out.worst.assign(c_r0_grid.size(), 0.0);
    std::vector<double> caps(samples);
    for (std::size_t u = 0; u < laws.size(); ++u) {
        StreamEngine rng = make_stream(seed, StreamTag::BsMonteCarlo, u, 0, 2);
        for (auto& c : caps) {
            c = laws[u].sample_capacity(rng);
        }
        std::sort(caps.begin(), caps.end());
        for (std::size_t k = 0; k < c_r0_grid.size(); ++k) {
            const auto below = std::lower_bound(caps.begin(), caps.end(), c_r0_grid[k]) - caps.begin();
            out.per_user[k][u] = static_cast<double>(below) / samples;
            out.worst[k] = std::max(out.worst[k], laws[u].outage_probability(c_r0_grid[k]));
        }
    }
    return out;
}

namespace {

/// Realized served/outage split: user u is out when its first Monte Carlo
/// capacity draw misses the rate or (for harmonic) its file is not broadcast.
std::array<std::int64_t, kTierCount> realized_tiers(const std::vector<double>& per_user_outage,
                                                    double file_miss, std::uint64_t seed,
                                                    std::size_t k)
{
    std::array<std::int64_t, kTierCount> t{};
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t u = 0; u < per_user_outage.size(); ++u) {
        StreamEngine rng = make_stream(seed, StreamTag::BsMonteCarlo, u, k, 3);
        const bool miss = unif(rng) < file_miss;
        const bool fade = unif(rng) < per_user_outage[u];
        ++t[static_cast<int>(miss || fade ? Tier::Outage : Tier::BaseStation)];
    }
    return t;
}

double mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

} // namespace

std::vector<SchemePoint> coded_multicast_tradeoff(const std::vector<BsLinkLaw>& laws, int m,
                                                  double M, const std::vector<double>& c_r0_grid,
                                                  int samples, std::uint64_t seed,
                                                  ThroughputMode mode)
{
    const auto n = static_cast<double>(laws.size());
    const double ntx = coded_multicast_ntx(n, m, M);
    const MulticastOutage o = multicast_outage(laws, c_r0_grid, samples, seed);
    std::vector<SchemePoint> out;
    for (std::size_t k = 0; k < c_r0_grid.size(); ++k) {
        SchemePoint pt;
        const double rate = ntx > 0.0 ? c_r0_grid[k] / ntx : c_r0_grid[k];
        pt.p_o = mean(o.per_user[k]);
        pt.t_min_bps = mode == ThroughputMode::WorstCase ? rate * (1.0 - o.worst[k])
                                                         : (pt.p_o < 1.0 ? rate : 0.0);
        pt.tiers = realized_tiers(o.per_user[k], 0.0, seed, k);
        out.push_back(pt);
    }
    return out;
}

HarmonicPlan harmonic_plan(double L, double tau)
{
    if (!(tau > 0.0) || !(L > 0.0) || tau > L) {
        throw std::invalid_argument("harmonic_plan: need 0 < tau <= L");
    }
    const auto blocks = static_cast<int>(std::ceil(L / tau - 1e-12));
    HarmonicPlan plan = harmonic_plan_from_blocks(L, std::max(1, blocks));
    plan.tau = tau;
    return plan;
}

HarmonicPlan harmonic_plan_from_blocks(double L, int blocks)
{
    if (blocks < 1 || !(L > 0.0)) {
        throw std::invalid_argument("harmonic_plan: need P >= 1 and L > 0");
    }
    HarmonicPlan plan;
    plan.L = L;
    plan.blocks = blocks;
    plan.tau = L / blocks;
    double h = 0.0;
    for (int i = blocks; i >= 1; --i) {
        h += 1.0 / i;
    }
    plan.factor = h;
    return plan;
}

int harmonic_broadcast_set(double c_r0, double rate_bps, const HarmonicPlan& plan, int m)
{
    if (!(rate_bps > 0.0)) {
        throw std::invalid_argument("harmonic_broadcast_set: rate must be positive");
    }
    const double fit = std::floor(c_r0 / (rate_bps * plan.factor) + 1e-12);
    return static_cast<int>(std::clamp(fit, 0.0, static_cast<double>(m)));
}

std::vector<SchemePoint> harmonic_tradeoff(const std::vector<BsLinkLaw>& laws,
                                           const ZipfDemand& demand, const HarmonicPlan& plan,
                                           double rate_bps, const std::vector<double>& c_r0_grid,
                                           int samples, std::uint64_t seed, ThroughputMode mode)
{
    const MulticastOutage o = multicast_outage(laws, c_r0_grid, samples, seed);
    std::vector<SchemePoint> out;
    for (std::size_t k = 0; k < c_r0_grid.size(); ++k) {
        const int m_prime = harmonic_broadcast_set(c_r0_grid[k], rate_bps, plan, demand.m);
        const double miss = demand.tail(m_prime);
        SchemePoint pt;
        double acc = 0.0;
        for (double pu : o.per_user[k]) {
            acc += 1.0 - (1.0 - miss) * (1.0 - pu);
        }
        pt.p_o = laws.empty() ? 1.0 : acc / static_cast<double>(laws.size());
        if (mode == ThroughputMode::WorstCase) {
            pt.t_min_bps = rate_bps * (1.0 - miss) * (1.0 - o.worst[k]);
        } else {
            pt.t_min_bps = pt.p_o < 1.0 ? rate_bps : 0.0;
        }
        if (m_prime == 0) {
            pt.t_min_bps = 0.0;
        }
        pt.tiers = realized_tiers(o.per_user[k], miss, seed, k);
        out.push_back(pt);
    }
    return out;
}

} // namespace d2dcache
