#pragma once

#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/geometry.hpp"
#include "d2dcache/scheme_point.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace d2dcache {

/**
 * Distribution of one user's base-station downlink: a mixture over link
 * states of lognormal pathloss (environment and body shadowing combined),
 * floored at free space, on an effective bandwidth of B / reuse.
 */
struct BsLinkLaw {
    struct Component {
        double weight = 1.0;
        double median_db = 0.0;
        double sigma_db = 0.0;
    };
    std::vector<Component> components;
    double floor_db = -std::numeric_limits<double>::infinity();
    double eirp_dbm = 0.0;
    double noise_dbm = 0.0;
    double bandwidth_hz = 0.0;

    /// P(pathloss > pl_db).
    double pathloss_exceedance(double pl_db) const;
    /// Pathloss above which the link cannot carry rate_bps.
    double pathloss_threshold(double rate_bps) const;
    double capacity_at(double pl_db) const;
    /// P(C < rate_bps).
    double outage_probability(double rate_bps) const;
    /// Rate C_u with P(C <= C_u) = p, by bisection on the pathloss tail.
    double rate_quantile(double p) const;

    template <class Rng>
    double sample_pathloss(Rng& rng) const
    {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(rng);
        const Component* c = &components.back();
        for (const auto& comp : components) {
            if (u < comp.weight) {
                c = &comp;
                break;
            }
            u -= comp.weight;
        }
        std::normal_distribution<double> shadow(c->median_db, c->sigma_db);
        return std::max(shadow(rng), floor_db);
    }

    template <class Rng>
    double sample_capacity(Rng& rng) const
    {
        return capacity_at(sample_pathloss(rng));
    }
};

BsLinkLaw bs_link_law(const ChannelModel& channel, const CellLayout& layout, Point user,
                      const BandConfig& cellular);

std::vector<BsLinkLaw> bs_link_laws(const ChannelModel& channel, const CellLayout& layout,
                                    const NodePlacement& placement, const BandConfig& cellular);

/// How the multicast baselines turn the common rate into T_min.
enum class ThroughputMode { WorstCase, ServedMean };

std::string_view to_string(ThroughputMode mode);
ThroughputMode parse_throughput_mode(std::string_view text);

/**
 * Conventional unicast, one realization. For each target p_o every user gets
 * the rate C_u whose outage probability is exactly p_o; each user is then
 * independently in outage with probability p_o, and the served set shares the
 * downlink with rho_u proportional to 1/C_u. T_min = 1/sum_A(1/C_u), scaled by
 * the local caching gain 1/(1 - M/m). Row p_o is the target.
 */
std::vector<SchemePoint> unicast_tradeoff(const std::vector<BsLinkLaw>& laws, int M, int m,
                                          const std::vector<double>& p_o_grid,
                                          std::uint64_t seed);

/// Equivalent file transmissions of coded multicasting, convex envelope in M.
double coded_multicast_ntx(double n, double m, double M);

/**
 * Per-user channel outage at each common rate: Monte Carlo estimate over
 * `samples` draws (result[k][u]) and the closed form worst case over users.
 */
struct MulticastOutage {
    std::vector<std::vector<double>> per_user;
    std::vector<double> worst;
};

MulticastOutage multicast_outage(const std::vector<BsLinkLaw>& laws,
                                 const std::vector<double>& c_r0_grid, int samples,
                                 std::uint64_t seed);

/// Coded multicasting, one realization: R = C_r0 / N_TX.
std::vector<SchemePoint> coded_multicast_tradeoff(const std::vector<BsLinkLaw>& laws, int m,
                                                  double M, const std::vector<double>& c_r0_grid,
                                                  int samples, std::uint64_t seed,
                                                  ThroughputMode mode = ThroughputMode::WorstCase);

struct HarmonicPlan {
    double L = 0.0;   ///< file length
    double tau = 0.0; ///< startup delay, same unit as L
    int blocks = 1;   ///< P = ceil(L / tau)
    double factor = 1.0; ///< H_P, exact harmonic sum
};

HarmonicPlan harmonic_plan(double L, double tau);
HarmonicPlan harmonic_plan_from_blocks(double L, int blocks);

/// Number of files that fit in the common rate: min(floor(C_r0 / (R H_P)), m).
int harmonic_broadcast_set(double c_r0, double rate_bps, const HarmonicPlan& plan, int m);

/// Harmonic broadcasting, one realization.
std::vector<SchemePoint> harmonic_tradeoff(const std::vector<BsLinkLaw>& laws,
                                           const ZipfDemand& demand, const HarmonicPlan& plan,
                                           double rate_bps, const std::vector<double>& c_r0_grid,
                                           int samples, std::uint64_t seed,
                                           ThroughputMode mode = ThroughputMode::WorstCase);

} // namespace d2dcache
