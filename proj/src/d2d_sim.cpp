#include "d2dcache/d2d_sim.hpp"

#include "d2dcache/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace d2dcache {

int analytic_reuse_factor(double delta)
{
    if (delta < 0.0) {
        throw std::invalid_argument("analytic_reuse_factor: delta must be non-negative");
    }
    const int side = static_cast<int>(std::ceil(std::sqrt(2.0) * (1.0 + delta))) + 1;
    return side * side;
}

int ClusterGrid::cluster_of(Point p) const
{
    auto axis = [&](double v) {
        const auto i = static_cast<int>(std::floor(v / cluster_side));
        return std::clamp(i, 0, per_axis - 1);
    };
    return axis(p.x) + axis(p.y) * per_axis;
}

int ClusterGrid::color(int cluster) const
{
    const int cx = cluster % per_axis;
    const int cy = cluster / per_axis;
    return cx % color_side + color_side * (cy % color_side);
}

ClusterGrid build_clusters(double cell_side, double cluster_side, int K)
{
    if (!(cluster_side > 0.0) || cluster_side > cell_side * (1.0 + 1e-12)) {
        throw std::invalid_argument("build_clusters: cluster_side must be in (0, cell_side]");
    }
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(K))));
    if (K < 1 || side * side != K) {
        throw std::invalid_argument("build_clusters: reuse factor K = " + std::to_string(K) +
                                    " is not a perfect square");
    }
    ClusterGrid g;
    g.cell_side = cell_side;
    g.cluster_side = cluster_side;
    g.per_axis = std::max(1, static_cast<int>(std::ceil(cell_side / cluster_side - 1e-9)));
    g.reuse = K;
    g.color_side = side;
    return g;
}

std::vector<int> assign_clusters(const ClusterGrid& grid, const NodePlacement& placement)
{
    std::vector<int> out;
    out.reserve(placement.size());
    for (const auto& p : placement.positions) {
        out.push_back(grid.cluster_of(p));
    }
    return out;
}

std::vector<PotentialLink> find_potential_links(const ClusterGrid& grid,
                                                const NodePlacement& placement,
                                                const CacheAssignment& caches,
                                                const std::vector<int>& requests)
{
    const int n = static_cast<int>(placement.size());
    if (caches.n != n || static_cast<int>(requests.size()) != n) {
        throw std::invalid_argument("find_potential_links: inconsistent sizes");
    }
    const std::vector<int> cluster = assign_clusters(grid, placement);
    std::vector<std::vector<int>> members(grid.count());
    for (int i = 0; i < n; ++i) {
        members[cluster[i]].push_back(i);
    }
    std::vector<PotentialLink> out;
    for (int i = 0; i < n; ++i) {
        const int f = requests[i];
        if (caches.holds(i, f)) {
            out.push_back(PotentialLink{i, kSelfCache, f, cluster[i]});
            continue;
        }
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j : members[cluster[i]]) {
            if (j == i || !caches.holds(j, f)) {
                continue;
            }
            const double d = distance(placement.positions[i], placement.positions[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best >= 0) {
            out.push_back(PotentialLink{i, best, f, cluster[i]});
        }
    }
    return out;
}

ChannelGainModel::ChannelGainModel(const ChannelModel& channel, const CellLayout& layout,
                                   const NodePlacement& placement, BandConfig band,
                                   std::uint64_t seed)
    : channel_(channel), layout_(layout), placement_(placement), band_(band), seed_(seed)
{
    if (band_.band == Band::Cellular2_1 && band_.max_range_m == std::numeric_limits<double>::infinity()) {
        // in-band D2D on the cellular carrier keeps the microwave D2D range
        band_.max_range_m = BandConfig::defaults(Band::Ism2_45).max_range_m;
    }
}

ChannelGainModel::Draw ChannelGainModel::draw(int a, int b) const
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    const Endpoint ea{placement_.positions[lo], EndpointKind::Device};
    const Endpoint eb{placement_.positions[hi], EndpointKind::Device};
    const LinkGeometry g = classify_link(layout_, ea, eb);
    StreamEngine rng = make_stream(seed_, StreamTag::LinkState,
                                   static_cast<std::uint64_t>(band_.band), lo, hi);
    // the cellular carrier carries D2D traffic with the microwave D2D models
    BandConfig model_band = band_;
    if (model_band.band == Band::Cellular2_1) {
        model_band.band = Band::Ism2_45;
    }
    const double p = los_probability(g.scenario, layout_.environment, g.distance);
    const LosState los = sample_los_state(p, model_band.band, LinkKind::D2D, rng, channel_.body());
    const auto pl = pathloss(channel_, layout_.environment, g, los, model_band, rng, false);
    return Draw{pl.value_or(0.0), g.distance, pl.has_value()};
}

std::optional<double> ChannelGainModel::pathloss_db(int a, int b) const
{
    const Draw d = draw(a, b);
    if (!d.exists) {
        return std::nullopt;
    }
    return d.pathloss_db;
}

double ChannelGainModel::signal_mw(int tx, int rx) const
{
    const Draw d = draw(tx, rx);
    if (!d.exists || d.distance > band_.max_range_m) {
        return 0.0;
    }
    return dbm_to_mw(band_.eirp_dbm() - d.pathloss_db);
}

double ChannelGainModel::interference_mw(int tx, int rx) const
{
    const Draw d = draw(tx, rx);
    if (!d.exists) {
        return 0.0;
    }
    return dbm_to_mw(band_.eirp_dbm() - d.pathloss_db);
}

std::string_view to_string(LinkAdmission a)
{
    return a == LinkAdmission::PerCluster ? "per_cluster" : "all_links";
}

LinkAdmission link_admission_from_string(std::string_view s)
{
    if (s == "per_cluster") {
        return LinkAdmission::PerCluster;
    }
    if (s == "all_links") {
        return LinkAdmission::AllLinks;
    }
    throw std::invalid_argument("unknown link admission '" + std::string(s) + "'");
}

RadioParams radio_params(const BandConfig& band, double noise_figure_db)
{
    RadioParams r;
    r.bandwidth_hz = band.bandwidth_hz;
    r.noise_mw = dbm_to_mw(noise_power_dbm(band.bandwidth_hz, noise_figure_db));
    r.interference_free = band.band == Band::MmWave38;
    return r;
}

std::vector<double> active_sinr(const std::vector<ScheduledLink>& active, const GainModel& gains,
                                const RadioParams& radio)
{
    std::vector<double> out(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
        const double s = gains.signal_mw(active[i].tx, active[i].rx);
        double interference = 0.0;
        if (!radio.interference_free && s > 0.0) {
            for (std::size_t j = 0; j < active.size(); ++j) {
                if (j != i) {
                    interference += gains.interference_mw(active[j].tx, active[i].rx);
                }
            }
        }
        out[i] = s / (radio.noise_mw + interference);
    }
    return out;
}

std::vector<double> schedule_and_rate(const ClusterGrid& grid,
                                      const std::vector<ScheduledLink>& links,
                                      const GainModel& gains, const RadioParams& radio, int rounds)
{
    const int K = grid.reuse;
    std::vector<std::vector<std::size_t>> by_cluster(grid.count());
    for (std::size_t i = 0; i < links.size(); ++i) {
        const int c = links[i].cluster;
        if (c < 0 || c >= grid.count()) {
            throw std::invalid_argument("schedule_and_rate: link cluster out of range");
        }
        by_cluster[c].push_back(i);
    }
    std::size_t max_links = 0;
    std::vector<std::vector<int>> by_color(K);
    for (int c = 0; c < grid.count(); ++c) {
        if (!by_cluster[c].empty()) {
            by_color[grid.color(c)].push_back(c);
            max_links = std::max(max_links, by_cluster[c].size());
        }
    }
    std::vector<double> rate(links.size(), 0.0);
    if (max_links == 0) {
        return rate;
    }
    if (rounds <= 0) {
        rounds = static_cast<int>(10 * K * max_links);
    }

    // Co-active links always share a color, so interference gains are kept in
    // one lazily filled table per color, indexed by position within the color.
    std::vector<std::size_t> slot(links.size(), 0);
    std::vector<std::size_t> color_size(K, 0);
    for (int k = 0; k < K; ++k) {
        for (int c : by_color[k]) {
            for (std::size_t i : by_cluster[c]) {
                slot[i] = color_size[k]++;
            }
        }
    }
    constexpr std::size_t kTableBudget = std::size_t{1} << 25;
    std::size_t table_entries = 0;
    for (std::size_t s : color_size) {
        table_entries += s * s;
    }
    const bool use_table = !radio.interference_free && table_entries <= kTableBudget;
    const double unset = -1.0;
    std::vector<std::vector<double>> table(K);
    if (use_table) {
        for (int k = 0; k < K; ++k) {
            table[k].assign(color_size[k] * color_size[k], unset);
        }
    }
    auto interference = [&](int k, std::size_t from, std::size_t to) {
        if (!use_table) {
            return gains.interference_mw(links[from].tx, links[to].rx);
        }
        double& g = table[k][slot[from] * color_size[k] + slot[to]];
        if (g == unset) {
            g = gains.interference_mw(links[from].tx, links[to].rx);
        }
        return g;
    };

    std::vector<double> signal(links.size());
    for (std::size_t i = 0; i < links.size(); ++i) {
        signal[i] = gains.signal_mw(links[i].tx, links[i].rx);
    }

    std::vector<double> cap_sum(links.size(), 0.0);
    std::vector<int> activations(links.size(), 0);
    std::vector<std::size_t> next(grid.count(), 0);
    std::vector<std::size_t> active;
    for (int t = 0; t < rounds; ++t) {
        const int k = t % K;
        active.clear();
        for (int c : by_color[k]) {
            const auto& list = by_cluster[c];
            active.push_back(list[next[c] % list.size()]);
            ++next[c];
        }
        for (std::size_t a : active) {
            double noise_plus_i = radio.noise_mw;
            if (!radio.interference_free && signal[a] > 0.0) {
                for (std::size_t b : active) {
                    if (b != a) {
                        noise_plus_i += interference(k, b, a);
                    }
                }
            }
            cap_sum[a] += radio.bandwidth_hz * std::log2(1.0 + signal[a] / noise_plus_i);
            ++activations[a];
        }
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (activations[i] > 0) {
            const double share = 1.0 / (K * static_cast<double>(by_cluster[links[i].cluster].size()));
            rate[i] = cap_sum[i] / activations[i] * share;
        }
    }
    return rate;
}

std::pair<std::vector<std::size_t>, double> bs_admission(const std::vector<double>& capacity,
                                                         double threshold_bps, int budget)
{
    std::vector<std::size_t> order(capacity.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return capacity[a] > capacity[b]; });
    double inv = 0.0;
    std::size_t k = 0;
    double rate = 0.0;
    for (std::size_t i : order) {
        if (budget > 0 && k >= static_cast<std::size_t>(budget)) {
            break;
        }
        if (!(capacity[i] > 0.0)) {
            break;
        }
        const double next_inv = inv + 1.0 / capacity[i];
        if (1.0 / next_inv < threshold_bps) {
            break;
        }
        inv = next_inv;
        rate = 1.0 / inv;
        ++k;
    }
    order.resize(k);
    return {order, rate};
}

ScheduleOutcome multiband_delivery(const ChannelModel& channel, const CellLayout& layout,
                                   const NodePlacement& placement, const ClusterGrid& grid,
                                   const CacheAssignment& caches, const std::vector<int>& requests,
                                   const DeliveryConfig& config, std::uint64_t seed)
{
    const std::size_t n = placement.size();
    ScheduleOutcome out;
    out.throughput_bps.assign(n, 0.0);
    out.tier.assign(n, Tier::Outage);

    std::vector<PotentialLink> pending;
    for (const auto& l : find_potential_links(grid, placement, caches, requests)) {
        if (l.self()) {
            out.tier[l.rx] = Tier::SelfCache;
            out.throughput_bps[l.rx] = config.playback_cap_bps;
        } else {
            pending.push_back(l);
        }
    }

    auto serve_band = [&](const BandConfig& band, Tier tier) {
        ChannelGainModel gains(channel, layout, placement, band, seed);
        const RadioParams radio = radio_params(band, channel.noise_figure_db());
        std::vector<PotentialLink> cand;
        std::vector<PotentialLink> rest;
        for (const auto& l : pending) {
            const double sig = gains.signal_mw(l.tx, l.rx);
            bool ok = sig > 0.0;
            if (config.admission == LinkAdmission::AllLinks) {
                ok = ok && radio.bandwidth_hz * std::log2(1.0 + sig / radio.noise_mw) >=
                               config.threshold_bps;
            }
            (ok ? cand : rest).push_back(l);
        }
        if (config.admission == LinkAdmission::AllLinks && !cand.empty()) {
            std::vector<ScheduledLink> sched;
            for (const auto& l : cand) {
                sched.push_back(ScheduledLink{l.tx, l.rx, l.cluster});
            }
            const std::vector<double> rate =
                schedule_and_rate(grid, sched, gains, radio, config.rounds);
            for (std::size_t i = 0; i < cand.size(); ++i) {
                out.tier[cand[i].rx] = rate[i] >= config.threshold_bps ? tier : Tier::Outage;
                out.throughput_bps[cand[i].rx] = rate[i];
            }
            cand.clear();
        }
        while (!cand.empty()) {
            std::vector<ScheduledLink> sched;
            sched.reserve(cand.size());
            for (const auto& l : cand) {
                sched.push_back(ScheduledLink{l.tx, l.rx, l.cluster});
            }
            const std::vector<double> rate =
                schedule_and_rate(grid, sched, gains, radio, config.rounds);
            if (std::all_of(rate.begin(), rate.end(),
                            [&](double r) { return r >= config.threshold_bps; })) {
                for (std::size_t i = 0; i < cand.size(); ++i) {
                    out.tier[cand[i].rx] = tier;
                    out.throughput_bps[cand[i].rx] = rate[i];
                }
                break;
            }
            // Per cluster, keep the largest set of strongest links that would
            // still meet the threshold with the airtime split among them.
            std::vector<std::vector<std::size_t>> members(grid.count());
            for (std::size_t i = 0; i < cand.size(); ++i) {
                members[cand[i].cluster].push_back(i);
            }
            std::vector<char> kept(cand.size(), 0);
            for (auto& list : members) {
                const double L = static_cast<double>(list.size());
                std::stable_sort(list.begin(), list.end(),
                                 [&](std::size_t a, std::size_t b) { return rate[a] > rate[b]; });
                std::size_t admit = 0;
                for (std::size_t j = 0; j < list.size(); ++j) {
                    // rate * L is the per-activation capacity over K
                    if (rate[list[j]] * L >= config.threshold_bps * static_cast<double>(j + 1)) {
                        admit = j + 1;
                    }
                }
                for (std::size_t j = 0; j < admit; ++j) {
                    kept[list[j]] = 1;
                }
            }
            std::vector<PotentialLink> keep;
            for (std::size_t i = 0; i < cand.size(); ++i) {
                (kept[i] ? keep : rest).push_back(cand[i]);
            }
            cand = std::move(keep);
        }
        std::sort(rest.begin(), rest.end(),
                  [](const PotentialLink& a, const PotentialLink& b) { return a.rx < b.rx; });
        pending = std::move(rest);
    };

    if (config.mmwave) {
        serve_band(*config.mmwave, Tier::MmWave);
    }
    if (config.microwave) {
        serve_band(*config.microwave, Tier::Microwave);
    }

    if (config.cellular) {
        std::vector<std::size_t> users;
        std::vector<double> cap;
        for (std::size_t u = 0; u < n; ++u) {
            if (out.tier[u] != Tier::Outage) {
                continue;
            }
            const BsLinkLaw law = bs_link_law(channel, layout, placement.positions[u], *config.cellular);
            StreamEngine rng = make_stream(seed, StreamTag::BsState, u);
            users.push_back(u);
            cap.push_back(law.sample_capacity(rng));
        }
        const auto [admitted, rate] = bs_admission(cap, config.threshold_bps, config.bs_budget);
        for (std::size_t i : admitted) {
            out.tier[users[i]] = Tier::BaseStation;
            out.throughput_bps[users[i]] = rate;
        }
    }
    return out;
}

SchemePoint throughput_outage_point(const ScheduleOutcome& outcome, double threshold_bps)
{
    SchemePoint pt;
    const std::size_t n = outcome.tier.size();
    double served_sum = 0.0;
    std::int64_t served = 0;
    for (std::size_t u = 0; u < n; ++u) {
        Tier t = outcome.tier[u];
        if (t != Tier::Outage && outcome.throughput_bps[u] < threshold_bps) {
            t = Tier::Outage;
        }
        ++pt.tiers[static_cast<int>(t)];
        if (t != Tier::Outage) {
            served_sum += outcome.throughput_bps[u];
            ++served;
        }
    }
    if (n == 0 || served == 0) {
        pt.p_o = 1.0;
        pt.t_min_bps = 0.0;
        return pt;
    }
    pt.p_o = static_cast<double>(n - static_cast<std::size_t>(served)) / static_cast<double>(n);
    pt.t_min_bps = served_sum / static_cast<double>(served);
    return pt;
}

} // namespace d2dcache
