#include "d2dcache/harness.hpp"

#include "d2dcache/rng.hpp"
#include "d2dcache/scaling_laws.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <thread>

namespace d2dcache {

std::uint64_t realization_seed(std::uint64_t master, int realization)
{
    return derive_key({master, static_cast<std::uint64_t>(realization)});
}

namespace {

struct SweepPoint {
    SchemeKind scheme = SchemeKind::D2D;
    int n = 0;
    int m = 0;
    int M = 0;
    std::optional<double> cluster_side;
    std::optional<double> band_split;
};

struct TaskOutput {
    std::vector<SchemePoint> points;
    std::vector<UserSample> users;
};

struct Context {
    const ExperimentConfig& config;
    ChannelModel channel;
    CellLayout layout;
    std::vector<double> c_r0_grid;
};

// The water-filling support can fall short of M for tiny clusters; widen the
// cluster population until every cache can be filled with distinct files.
CachingDistribution cache_distribution(const ZipfDemand& demand, int M, double g_c,
                                       ExponentMode mode)
{
    double g = std::max(g_c, 1.0 + 1.0 / M + 1e-12);
    if (mode == ExponentMode::NeighborCount) {
        g = std::max(g_c, 1.0 + 1e-12);
    }
    for (int i = 0; i < 200; ++i) {
        CachingDistribution d = optimal_cache_distribution(demand, M, g, mode);
        if (d.support >= M) {
            return d;
        }
        g *= 1.25;
    }
    throw std::runtime_error("cache_distribution: could not reach a support of M files");
}

DeliveryConfig delivery_config(const ExperimentConfig& c, SchemeKind scheme,
                               std::optional<double> split)
{
    DeliveryConfig d;
    d.threshold_bps = c.threshold_bps;
    d.playback_cap_bps = c.playback_cap_bps;
    d.rounds = c.rounds;
    d.bs_budget = c.bs_budget;
    d.admission = c.admission;
    switch (scheme) {
    case SchemeKind::D2D:
        d.microwave = BandConfig::defaults(Band::Ism2_45);
        break;
    case SchemeKind::D2DMultiband:
        d.mmwave = BandConfig::defaults(Band::MmWave38);
        d.microwave = BandConfig::defaults(Band::Ism2_45);
        d.cellular = BandConfig::defaults(Band::Cellular2_1);
        break;
    case SchemeKind::D2DInband: {
        const BandConfig cell = BandConfig::defaults(Band::Cellular2_1);
        BandConfig d2d = BandConfig::defaults(Band::Ism2_45);
        d2d.band = Band::Cellular2_1;
        d2d.carrier_hz = cell.carrier_hz;
        d2d.bandwidth_hz = cell.bandwidth_hz * *split;
        d.microwave = d2d;
        if (*split < 1.0) {
            BandConfig bs = cell;
            bs.bandwidth_hz = cell.bandwidth_hz * (1.0 - *split);
            d.cellular = bs;
        }
        break;
    }
    default:
        break;
    }
    return d;
}

TaskOutput run_d2d(const Context& ctx, const SweepPoint& pt, int realization)
{
    const ExperimentConfig& c = ctx.config;
    const std::uint64_t seed = realization_seed(c.seed, realization);
    const NodePlacement placement = place_nodes(ctx.layout, pt.n, c.placement, seed);
    const ZipfDemand demand = zipf_pmf(pt.m, c.gamma_r);
    const double side = *pt.cluster_side;
    const double g_c = pt.n * (side / c.cell_side) * (side / c.cell_side);
    const CachingDistribution dist = cache_distribution(demand, pt.M, g_c, c.exponent_mode);
    const CacheAssignment caches = place_caches(dist, pt.n, pt.M, seed);
    const std::vector<int> requests = sample_requests(demand, pt.n, seed);
    const ClusterGrid grid = build_clusters(c.cell_side, side, c.d2d_reuse);
    const DeliveryConfig dc = delivery_config(c, pt.scheme, pt.band_split);
    const ScheduleOutcome out =
        multiband_delivery(ctx.channel, ctx.layout, placement, grid, caches, requests, dc, seed);

    TaskOutput t;
    t.points.push_back(throughput_outage_point(out, c.threshold_bps));
    if (c.per_user_dump) {
        for (int u = 0; u < pt.n; ++u) {
            Tier tier = out.tier[u];
            if (tier != Tier::Outage && out.throughput_bps[u] < c.threshold_bps) {
                tier = Tier::Outage;
            }
            t.users.push_back(UserSample{std::string(to_string(pt.scheme)), pt.n, pt.m, pt.M,
                                         pt.cluster_side, pt.band_split, realization, u, tier,
                                         out.throughput_bps[u]});
        }
    }
    return t;
}

TaskOutput run_bs(const Context& ctx, const SweepPoint& pt, int realization)
{
    const ExperimentConfig& c = ctx.config;
    const std::uint64_t seed = realization_seed(c.seed, realization);
    const NodePlacement placement = place_nodes(ctx.layout, pt.n, c.placement, seed);
    const auto laws =
        bs_link_laws(ctx.channel, ctx.layout, placement, BandConfig::defaults(Band::Cellular2_1));
    TaskOutput t;
    switch (pt.scheme) {
    case SchemeKind::Unicast:
        t.points = unicast_tradeoff(laws, pt.M, pt.m, c.p_o_grid, seed);
        break;
    case SchemeKind::Coded:
        t.points = coded_multicast_tradeoff(laws, pt.m, pt.M, ctx.c_r0_grid, c.mc_samples, seed,
                                            c.throughput_mode);
        break;
    case SchemeKind::Harmonic:
        t.points = harmonic_tradeoff(laws, zipf_pmf(pt.m, c.gamma_r),
                                     harmonic_plan_from_blocks(c.harmonic.file_bits, c.harmonic.blocks),
                                     c.harmonic.rate_bps, ctx.c_r0_grid, c.mc_samples, seed,
                                     c.throughput_mode);
        break;
    default:
        break;
    }
    return t;
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& c)
{
    std::vector<SweepPoint> out;
    for (auto scheme : c.schemes) {
        for (int n : c.n) {
            for (int m : c.m) {
                for (int M : c.M) {
                    SweepPoint base{scheme, n, m, M, std::nullopt, std::nullopt};
                    if (!is_d2d(scheme)) {
                        out.push_back(base);
                        continue;
                    }
                    const std::vector<std::optional<double>> splits =
                        scheme == SchemeKind::D2DInband
                            ? std::vector<std::optional<double>>(c.band_splits.begin(),
                                                                 c.band_splits.end())
                            : std::vector<std::optional<double>>{std::nullopt};
                    for (const auto& split : splits) {
                        for (double side : c.sides()) {
                            SweepPoint p = base;
                            p.cluster_side = side;
                            p.band_split = split;
                            out.push_back(p);
                        }
                    }
                }
            }
        }
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs)
{
    if (auto errs = validate(config); !errs.empty()) {
        throw ConfigError(std::move(errs));
    }
    Context ctx{config,
                ChannelModel(config.channel_params.empty()
                                 ? PathlossParams::defaults()
                                 : load_pathloss_params(config.channel_params)),
                build_layout(config.environment, config.cell_side),
                config.c_r0_grid.empty() ? default_c_r0_grid() : config.c_r0_grid};

    const std::vector<SweepPoint> points = sweep_points(config);
    const int R = config.realizations;
    const std::size_t task_count = points.size() * static_cast<std::size_t>(R);
    std::vector<TaskOutput> results(task_count);
    std::vector<std::exception_ptr> errors(task_count);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < task_count; i = next++) {
            const SweepPoint& pt = points[i / R];
            const int r = static_cast<int>(i % R);
            try {
                results[i] = is_d2d(pt.scheme) ? run_d2d(ctx, pt, r) : run_bs(ctx, pt, r);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || task_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, task_count); ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    ExperimentResult res;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const SweepPoint& pt = points[p];
        const std::size_t width = results[p * R].points.size();
        for (std::size_t k = 0; k < width; ++k) {
            ResultRow row;
            row.scheme = std::string(to_string(pt.scheme));
            row.environment = config.environment;
            row.n = pt.n;
            row.m = pt.m;
            row.M = pt.M;
            row.gamma_r = config.gamma_r;
            row.cluster_side = pt.cluster_side;
            row.band_split = pt.band_split;
            if (pt.scheme == SchemeKind::Coded || pt.scheme == SchemeKind::Harmonic) {
                row.c_r0 = ctx.c_r0_grid[k];
            }
            double p_sum = 0.0;
            double t_sum = 0.0;
            for (int r = 0; r < R; ++r) {
                const SchemePoint& sp = results[p * R + r].points[k];
                p_sum += sp.p_o;
                t_sum += sp.t_min_bps;
                for (int j = 0; j < kTierCount; ++j) {
                    row.tiers[j] += sp.tiers[j];
                }
            }
            row.p_o = p_sum / R;
            row.t_min_bps = t_sum / R;
            row.realizations = R;
            row.seed = config.seed;
            res.rows.push_back(std::move(row));
        }
        for (int r = 0; r < R; ++r) {
            auto& users = results[p * R + r].users;
            res.users.insert(res.users.end(), std::make_move_iterator(users.begin()),
                             std::make_move_iterator(users.end()));
        }
    }
    return res;
}

std::vector<ResultRow> analytic_rows(const ExperimentConfig& config)
{
    const AnalyticConfig& a = config.analytic;
    bool illustrative = false;
    auto constant = [&](const std::optional<double>& v) -> std::optional<double> {
        if (v || !a.illustrative_constants) {
            return v;
        }
        illustrative = true;
        return 1.0;
    };
    std::vector<ResultRow> rows;
    for (int n : config.n) {
        for (int m : config.m) {
            for (int M : config.M) {
                TradeoffParams q;
                q.gamma = config.gamma_r;
                q.M = M;
                q.m = m;
                q.C_r = a.link_rate;
                q.K = a.reuse;
                illustrative = false;
                // only knobs inside each regime's admissible range are evaluated
                for (double r : a.rho1_grid) {
                    if (r >= q.gamma) {
                        q.rho1_grid.push_back(r);
                    }
                }
                for (double g : a.g_c_grid) {
                    if (g <= q.gamma * m / M) {
                        q.g_c_grid.push_back(g);
                    }
                }
                for (double r : a.rho2_grid) {
                    if (r >= rho2_min(q.gamma, M)) {
                        q.rho2_grid.push_back(r);
                    }
                }
                q.include_r4 = a.include_r4;
                if (!q.g_c_grid.empty()) {
                    q.A = constant(a.A);
                }
                if (!q.rho2_grid.empty()) {
                    q.B = constant(a.B);
                }
                if (q.include_r4) {
                    q.D = constant(a.D);
                    q.a_gamma = constant(a.a_gamma);
                }
                const bool marked = illustrative;
                for (const auto& b : d2d_tradeoff_bound(q)) {
                    ResultRow row;
                    std::string name = "analytic-" + std::string(to_string(b.regime));
                    std::transform(name.begin(), name.end(), name.begin(),
                                   [](unsigned char ch) { return std::tolower(ch); });
                    if (marked && b.regime != Regime::R1) {
                        name += "-illustrative";
                    }
                    row.scheme = name;
                    row.environment = config.environment;
                    row.n = n;
                    row.m = m;
                    row.M = M;
                    row.gamma_r = config.gamma_r;
                    row.p_o = b.p;
                    row.t_min_bps = b.T;
                    row.realizations = 0;
                    row.seed = config.seed;
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

} // namespace d2dcache
