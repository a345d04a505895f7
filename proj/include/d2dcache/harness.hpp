#pragma once

#include "d2dcache/bs_schemes.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/d2d_sim.hpp"
#include "d2dcache/geometry.hpp"
#include "d2dcache/scheme_point.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace d2dcache {

enum class SchemeKind {
    D2D,          ///< 2.45 GHz D2D only
    D2DMultiband, ///< mm-wave, then 2.45 GHz, then the BS backstop
    D2DInband,    ///< D2D on a share of the cellular carrier, BS on the rest
    Unicast,
    Coded,
    Harmonic,
};

std::string_view to_string(SchemeKind s);
SchemeKind parse_scheme(std::string_view text);
bool is_d2d(SchemeKind s);

struct HarmonicConfig {
    double file_bits = 2.7e9;
    int blocks = 540;
    double rate_bps = 1e5; ///< playback rate R
    friend bool operator==(const HarmonicConfig&, const HarmonicConfig&) = default;
};

/// Closed-form overlay settings; unset constants fall back to 1 when
/// `illustrative_constants` is on and the rows are then tagged as such.
struct AnalyticConfig {
    double link_rate = 1.0;
    int reuse = 9;
    std::vector<double> rho1_grid{0.4, 0.6, 0.8, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
    std::vector<double> g_c_grid;
    std::vector<double> rho2_grid;
    bool include_r4 = false;
    std::optional<double> A, B, D, a_gamma;
    bool illustrative_constants = true;
    friend bool operator==(const AnalyticConfig&, const AnalyticConfig&) = default;
};

struct ExperimentConfig {
    std::string name = "experiment";
    Environment environment = Environment::Office;
    double cell_side = 600.0;
    std::vector<int> n{10000};
    std::vector<int> m{300};
    std::vector<int> M{20};
    double gamma_r = 0.4;
    PlacementMode placement = PlacementMode::UniformRandom;
    std::vector<SchemeKind> schemes{SchemeKind::D2D};
    std::vector<int> cluster_q{3, 4, 5, 6, 7, 8, 10, 12, 14, 16, 20}; ///< side = cell_side / Q
    std::vector<double> cluster_sides; ///< overrides cluster_q when non-empty
    int d2d_reuse = 4;
    std::vector<double> c_r0_grid;
    std::vector<double> p_o_grid{0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
    HarmonicConfig harmonic;
    double threshold_bps = 1e5;
    double playback_cap_bps = 2e6;
    int realizations = 10;
    std::uint64_t seed = 1;
    std::vector<double> band_splits{0.5}; ///< D2D share of the cellular bandwidth
    int bs_budget = 0;
    int mc_samples = 200;
    int rounds = 0;
    ThroughputMode throughput_mode = ThroughputMode::WorstCase;
    LinkAdmission admission = LinkAdmission::PerCluster;
    ExponentMode exponent_mode = ExponentMode::Paper;
    std::string channel_params; ///< pathloss parameter file; empty uses the built-in set
    std::string output_dir;
    bool write_json = false;
    bool per_user_dump = false;
    AnalyticConfig analytic;

    /// "desk" (n = 2000, 20 realizations) or "paper" (n = 10000).
    static ExperimentConfig profile(std::string_view name);
    /// Cluster sides actually swept.
    std::vector<double> sides() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Log-spaced common-rate grid used when c_r0_grid is empty.
std::vector<double> default_c_r0_grid();

struct ValidationError {
    std::string field;
    std::string message;
};

std::vector<ValidationError> validate(const ExperimentConfig& config);

/// Unknown keys and type mismatches throw ConfigError with every problem listed.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<ValidationError> errors);
    std::vector<ValidationError> errors;
};

std::string config_to_json(const ExperimentConfig& config);
/// Fields absent from the text keep the values of `base`.
ExperimentConfig config_from_json(std::string_view text,
                                  const ExperimentConfig& base = ExperimentConfig{});
ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = ExperimentConfig{});

inline constexpr int kSchemaVersion = 1;

struct ResultRow {
    int schema_version = kSchemaVersion;
    std::string scheme;
    Environment environment = Environment::Office;
    int n = 0;
    int m = 0;
    int M = 0;
    double gamma_r = 0.0;
    std::optional<double> cluster_side;
    std::optional<double> band_split;
    std::optional<double> c_r0;
    double p_o = 1.0;
    double t_min_bps = 0.0;
    std::array<std::int64_t, kTierCount> tiers{};
    int realizations = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

/// One user's delivery in one realization, for throughput CDFs.
struct UserSample {
    std::string scheme;
    int n = 0;
    int m = 0;
    int M = 0;
    std::optional<double> cluster_side;
    std::optional<double> band_split;
    int realization = 0;
    int user = 0;
    Tier tier = Tier::Outage;
    double throughput_bps = 0.0;

    friend bool operator==(const UserSample&, const UserSample&) = default;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<UserSample> users; ///< filled when per_user_dump is set
};

/// Seed of realization r; shared by every scheme and sweep point.
std::uint64_t realization_seed(std::uint64_t master, int realization);

/**
 * Runs the cartesian sweep. Each (sweep point, realization) is an independent
 * task; results are reduced in task order, so any `jobs` value gives the same
 * rows. Throws ConfigError if the config does not validate.
 */
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs = 1);

/// Closed-form D2D bound rows for every (n, m, M) of the config.
std::vector<ResultRow> analytic_rows(const ExperimentConfig& config);

std::string_view csv_header();
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_csv(std::istream& in);
std::string rows_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_json(std::string_view text);
void write_user_csv(const std::vector<UserSample>& users, std::ostream& out);
std::vector<UserSample> read_user_csv(std::istream& in);

enum class OutputFormat { CSV, JSON };

/// Throws std::runtime_error for empty rows or an unwritable path.
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path);

/// Output directory: explicit value, else $D2DCACHE_OUT, else "results".
std::string resolve_output_dir(const std::string& explicit_dir);

/**
 * Upper-left frontier of (p_o, T) points: sorted by p_o, each point strictly
 * better in T than every point with smaller or equal outage.
 */
std::vector<SchemePoint> pareto_frontier(std::vector<SchemePoint> points);

/// Throughput of the frontier at outage `target`, interpolating linearly
/// between frontier points (time sharing); nullopt below the smallest outage.
std::optional<double> throughput_at_outage(const std::vector<SchemePoint>& points, double target);

} // namespace d2dcache
