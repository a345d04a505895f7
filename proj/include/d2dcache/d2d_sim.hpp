#pragma once

#include "d2dcache/bs_schemes.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/geometry.hpp"
#include "d2dcache/scheme_point.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace d2dcache {

/// K = (ceil(sqrt(2)(1 + delta)) + 1)^2 for the protocol model with guard delta.
int analytic_reuse_factor(double delta);

/**
 * Square clusters partitioning the cell, colored with a periodic
 * sqrt(K) x sqrt(K) pattern. Clusters on the far edges are clipped when the
 * cell side is not a multiple of the cluster side.
 */
struct ClusterGrid {
    double cell_side = 600.0;
    double cluster_side = 100.0;
    int per_axis = 6;
    int reuse = 4;
    int color_side = 2;

    int count() const { return per_axis * per_axis; }
    int cluster_of(Point p) const;
    int color(int cluster) const;
};

/// Throws std::invalid_argument for non-square K or cluster_side outside (0, cell_side].
ClusterGrid build_clusters(double cell_side, double cluster_side, int K);

std::vector<int> assign_clusters(const ClusterGrid& grid, const NodePlacement& placement);

inline constexpr int kSelfCache = -1;

struct PotentialLink {
    int rx = 0;
    int tx = kSelfCache; ///< kSelfCache when the requester holds the file
    int file = 0;
    int cluster = 0;

    bool self() const { return tx == kSelfCache; }
    friend bool operator==(const PotentialLink&, const PotentialLink&) = default;
};

/**
 * One entry per requester whose file is available in its cluster: its own
 * cache first, otherwise the nearest holder in the cluster (lowest index on
 * ties). Requesters with no holder get no entry. Sorted by rx.
 */
std::vector<PotentialLink> find_potential_links(const ClusterGrid& grid,
                                                const NodePlacement& placement,
                                                const CacheAssignment& caches,
                                                const std::vector<int>& requests);

/// Received powers between devices in one band.
class GainModel {
public:
    virtual ~GainModel() = default;
    /// Power of the intended link at rx in mW; 0 when the link does not exist.
    virtual double signal_mw(int tx, int rx) const = 0;
    /// Power reaching rx from a co-active tx in mW.
    virtual double interference_mw(int tx, int rx) const = 0;
};

/// Dense gain table, handy for fixtures: gain[tx][rx] in mW.
class MatrixGainModel : public GainModel {
public:
    explicit MatrixGainModel(std::vector<std::vector<double>> gain) : gain_(std::move(gain)) {}
    double signal_mw(int tx, int rx) const override { return gain_[tx][rx]; }
    double interference_mw(int tx, int rx) const override { return gain_[tx][rx]; }

private:
    std::vector<std::vector<double>> gain_;
};

/**
 * Channel-backed gains for one band and realization. Each unordered device
 * pair gets one frozen draw of link state, environment shadowing and body
 * shadowing from a stream keyed by (seed, band, pair), so the value does not
 * depend on evaluation order and is recomputed on demand. The signal path
 * respects the band's range limit; interference does not.
 */
class ChannelGainModel : public GainModel {
public:
    ChannelGainModel(const ChannelModel& channel, const CellLayout& layout,
                     const NodePlacement& placement, BandConfig band, std::uint64_t seed);

    double signal_mw(int tx, int rx) const override;
    double interference_mw(int tx, int rx) const override;

    /// Pathloss draw without the range limit; nullopt when no path exists.
    std::optional<double> pathloss_db(int a, int b) const;
    const BandConfig& band() const { return band_; }

private:
    struct Draw {
        double pathloss_db;
        double distance;
        bool exists;
    };
    Draw draw(int a, int b) const;

    const ChannelModel& channel_;
    const CellLayout& layout_;
    const NodePlacement& placement_;
    BandConfig band_;
    std::uint64_t seed_;
};

struct RadioParams {
    double bandwidth_hz = 20e6;
    double noise_mw = 0.0;
    bool interference_free = false;
};

RadioParams radio_params(const BandConfig& band, double noise_figure_db);

struct ScheduledLink {
    int tx = 0;
    int rx = 0;
    int cluster = 0;
};

/// SINR of every link in one set of simultaneously active links.
std::vector<double> active_sinr(const std::vector<ScheduledLink>& active, const GainModel& gains,
                                const RadioParams& radio);

/**
 * TDMA round robin. Round t activates the clusters of color t mod K; each
 * active cluster serves its next link in turn. A link's average rate is its
 * mean capacity over its activations times its airtime share 1/(K L_c),
 * where L_c is the number of links in its cluster. rounds = 0 picks
 * 10 K max_c L_c. Links never activated get rate 0.
 */
std::vector<double> schedule_and_rate(const ClusterGrid& grid,
                                      const std::vector<ScheduledLink>& links,
                                      const GainModel& gains, const RadioParams& radio,
                                      int rounds = 0);

/// How a D2D band treats links whose scheduled rate misses the threshold.
enum class LinkAdmission {
    PerCluster, ///< drop the weakest links per cluster and reschedule until all meet it
    AllLinks,   ///< schedule every link whose stand-alone capacity meets it; misses are outages
};

std::string_view to_string(LinkAdmission a);
LinkAdmission link_admission_from_string(std::string_view s);

struct DeliveryConfig {
    std::optional<BandConfig> mmwave;
    std::optional<BandConfig> microwave;
    std::optional<BandConfig> cellular; ///< base-station backstop; nullopt disables it
    double threshold_bps = 1e5;
    double playback_cap_bps = 2e6;
    int rounds = 0;
    int bs_budget = 0; ///< max users admitted by the BS; 0 = limited by the threshold only
    LinkAdmission admission = LinkAdmission::PerCluster;
};

struct ScheduleOutcome {
    std::vector<double> throughput_bps;
    std::vector<Tier> tier;

    bool outage(std::size_t u) const { return tier[u] == Tier::Outage; }
};

/**
 * Users admitted by the base station: the largest set of best-capacity
 * candidates whose equal share 1/sum(1/C) meets the threshold (capped by the
 * budget). Returns the admitted indices into `capacity` and the common rate.
 */
std::pair<std::vector<std::size_t>, double> bs_admission(const std::vector<double>& capacity,
                                                         double threshold_bps, int budget);

/**
 * Per-user delivery cascade: own cache, then mm-wave D2D, then microwave D2D,
 * then the base station, else outage. With PerCluster admission every
 * candidate link of a band is scheduled; while some link misses the
 * threshold, each cluster keeps its largest set of strongest links that would
 * meet it under an equal airtime split, the others fall through to the next
 * tier, and the band is rescheduled. With AllLinks a link enters the first
 * band whose interference-free capacity meets the threshold and stays there.
 */
ScheduleOutcome multiband_delivery(const ChannelModel& channel, const CellLayout& layout,
                                   const NodePlacement& placement, const ClusterGrid& grid,
                                   const CacheAssignment& caches, const std::vector<int>& requests,
                                   const DeliveryConfig& config, std::uint64_t seed);

/// p_o = fraction of users in outage; T_min = mean throughput over served users.
SchemePoint throughput_outage_point(const ScheduleOutcome& outcome, double threshold_bps);

} // namespace d2dcache
