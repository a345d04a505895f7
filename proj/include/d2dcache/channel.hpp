#pragma once

#include "d2dcache/geometry.hpp"

#include <array>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>

namespace d2dcache {

inline constexpr double kSpeedOfLight = 299792458.0;

enum class Band { MmWave38, Ism2_45, Cellular2_1 };

std::string_view to_string(Band band);
Band parse_band(std::string_view text);

struct BandConfig {
    Band band = Band::Ism2_45;
    double bandwidth_hz = 20e6;
    double carrier_hz = 2.45e9;
    double tx_power_dbm = 20.0;
    double gain_tx_db = 12.0;
    double gain_rx_db = 0.0;
    int reuse = 4;
    double max_range_m = 100.0;

    /// Transmission parameter rows for the three link types.
    static BandConfig defaults(Band band);

    double eirp_dbm() const { return tx_power_dbm + gain_tx_db + gain_rx_db; }
};

enum class LinkState { LOS, BLOS, NLOS };
enum class LinkKind { D2D, BaseStation };

std::string_view to_string(LinkState s);
LinkState parse_link_state(std::string_view text);

/// Rotational body-shadowing standard deviations (dB), hand-to-hand for D2D
/// links and access-point-to-hand for base-station links.
struct BodyShadowing {
    double d2d_los = 4.2;
    double d2d_nlos = 3.6;
    double bs_los = 2.3;
    double bs_nlos = 2.2;

    double sigma(LinkKind kind, LinkState state) const
    {
        if (kind == LinkKind::D2D) {
            return state == LinkState::LOS ? d2d_los : d2d_nlos;
        }
        return state == LinkState::LOS ? bs_los : bs_nlos;
    }
};

struct LosState {
    LinkState state = LinkState::NLOS;
    double body_shadowing_db = 0.0; ///< microwave bands only
};

/// Environmental LOS probability of a link; clamped to [0, 1].
double los_probability(Scenario scenario, Environment environment, double d);

/// Boundary below which the indoor-office LOS probability is 1.
double office_los_breakpoint();

template <class Rng>
LosState sample_los_state(double p_los, Band band, LinkKind kind, Rng& rng,
                          const BodyShadowing& body = {})
{
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    LosState out;
    if (band == Band::MmWave38) {
        // nominal LOS splits evenly between true LOS and body-obstructed LOS
        if (u < 0.5 * p_los) {
            out.state = LinkState::LOS;
        } else if (u < p_los) {
            out.state = LinkState::BLOS;
        } else {
            out.state = LinkState::NLOS;
        }
        return out;
    }
    out.state = u < p_los ? LinkState::LOS : LinkState::NLOS;
    std::normal_distribution<double> body_draw(0.0, body.sigma(kind, out.state));
    out.body_shadowing_db = body_draw(rng);
    return out;
}

/// Log-distance row: PL = a1 log10(d) + a2 + a3 log10(fc[GHz]/5), shadowing sigma.
/// For 38 GHz rows a1 is the pathloss exponent alpha and a2/a3 are unused.
struct PathlossRow {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double sigma = 0.0;

    friend bool operator==(const PathlossRow&, const PathlossRow&) = default;
};

/// Scenario and environment keys allow a wildcard.
struct RowKey {
    Band band = Band::Ism2_45;
    std::optional<Scenario> scenario;
    std::optional<Environment> environment;
    LinkState state = LinkState::LOS;

    friend bool operator<(const RowKey& a, const RowKey& b)
    {
        auto tie = [](const RowKey& k) {
            return std::tuple{static_cast<int>(k.band),
                              k.scenario ? static_cast<int>(*k.scenario) : -1,
                              k.environment ? static_cast<int>(*k.environment) : -1,
                              static_cast<int>(k.state)};
        };
        return tie(a) < tie(b);
    }
    friend bool operator==(const RowKey&, const RowKey&) = default;
};

/**
 * Coefficient set behind every pathloss evaluation: keyed log-distance rows
 * plus named structural constants (breakpoint models, penetration terms,
 * body shadowing, noise). Serialized as a line-oriented text file; see
 * data/channel_params.txt for the shipped defaults and their sources.
 */
struct PathlossParams {
    int version = 1;
    std::map<RowKey, PathlossRow> rows;
    std::map<std::string, double> constants;

    /// Exact (band, scenario, environment, state) lookup with wildcard fallback.
    const PathlossRow& row(Band band, Scenario scenario, Environment environment,
                           LinkState state) const;
    double constant(const std::string& name) const;

    static PathlossParams defaults();

    friend bool operator==(const PathlossParams&, const PathlossParams&) = default;
};

void write_pathloss_params(const PathlossParams& params, std::ostream& out);
/// Throws std::runtime_error naming the offending line.
PathlossParams read_pathloss_params(std::istream& in);
PathlossParams load_pathloss_params(const std::string& path);
void save_pathloss_params(const PathlossParams& params, const std::string& path);

/// Deterministic part of a link's pathloss: median, shadowing sigma, and the
/// free-space value used as a floor.
struct PathlossModel {
    double median_db = 0.0;
    double sigma_db = 0.0;
    double floor_db = 0.0; ///< -inf when the floor is disabled
};

/**
 * Resolved channel model for fast evaluation. Built once from a
 * PathlossParams and the terminal heights; immutable afterwards.
 */
class ChannelModel {
public:
    explicit ChannelModel(PathlossParams params = PathlossParams::defaults(),
                          double bs_height = 25.0, double ms_height = 1.5);

    const PathlossParams& params() const { return params_; }
    const BodyShadowing& body() const { return body_; }
    double noise_figure_db() const { return noise_figure_; }
    double bs_height() const { return bs_height_; }
    double ms_height() const { return ms_height_; }
    bool free_space_floor() const { return floor_enabled_; }

    /// nullopt is NoLink: out of range (when enforce_range), mm-wave NLOS, or
    /// a mm-wave path blocked by a wall.
    std::optional<PathlossModel> model(Environment env, const LinkGeometry& g, LinkState state,
                                       const BandConfig& band, bool enforce_range = true) const;

    /// C2 breakpoint distance d'_BP = 4 h'_BS h'_MS f_c / c with effective heights h - 1.
    double c2_breakpoint(double carrier_hz) const;

private:
    struct Constants {
        double mmwave_d0_m, wall_loss_db, o2i_wall_db, o2i_angle_db, o2i_indoor_db_per_m;
        double c2_los_far_slope, c2_los_far_intercept, c2_los_far_hbs_coef, c2_los_far_hms_coef;
        double c2_los_far_freq_coef, c2_los_far_sigma, c2_nlos_hbs_slope, c2_nlos_hbs_coef;
        double c2_min_distance_m, c4_wall_db, c4_indoor_db_per_m, c4_hms_coef, min_distance_m;
    };

    const PathlossRow& row(Band band, Scenario scenario, Environment env, LinkState state) const;
    double log_distance(const PathlossRow& r, double d, double fc_ghz) const;
    double c2_los(double d, double fc_hz, double& sigma) const;
    double c2_nlos(double d, double fc_ghz) const;

    PathlossParams params_;
    Constants k_{};
    // resolved rows indexed [band][scenario][environment][state]; empty when absent
    std::array<std::optional<PathlossRow>, 3 * 6 * 2 * 3> table_{};
    BodyShadowing body_;
    double bs_height_;
    double ms_height_;
    double noise_figure_ = 6.0;
    bool floor_enabled_ = true;
};

double free_space_pathloss_db(double d, double carrier_hz);

/**
 * Draws the shadowed pathloss of one link: median + N(0, sigma) + body
 * shadowing carried by `los`, floored at free space. nullopt means NoLink.
 */
template <class Rng>
std::optional<double> pathloss(const ChannelModel& channel, Environment env, const LinkGeometry& g,
                               const LosState& los, const BandConfig& band, Rng& rng,
                               bool enforce_range = true)
{
    const auto m = channel.model(env, g, los.state, band, enforce_range);
    if (!m) {
        return std::nullopt;
    }
    std::normal_distribution<double> shadow(0.0, m->sigma_db);
    const double pl = m->median_db + shadow(rng) + los.body_shadowing_db;
    return std::max(pl, m->floor_db);
}

/// Thermal noise power over bandwidth B: -174 dBm/Hz + 10 log10(B) + F_N.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db = 6.0);

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Shannon rate with interference treated as noise.
double link_capacity(double signal_dbm, double interference_mw, double noise_dbm,
                     double bandwidth_hz);

} // namespace d2dcache
