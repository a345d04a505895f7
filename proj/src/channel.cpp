#include "d2dcache/channel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace d2dcache {

namespace {
constexpr std::string_view kBandNames[] = {"mmwave38", "ism2_45", "cellular2_1"};
constexpr std::string_view kStateNames[] = {"LOS", "BLOS", "NLOS"};

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_double: conversion failed");
    }
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, int line)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::runtime_error("channel params line " + std::to_string(line) +
                                 ": bad number '" + std::string(s) + "'");
    }
    return v;
}
} // namespace

std::string_view to_string(Band band)
{
    return kBandNames[static_cast<int>(band)];
}

Band parse_band(std::string_view text)
{
    for (int i = 0; i < 3; ++i) {
        if (kBandNames[i] == text) {
            return static_cast<Band>(i);
        }
    }
    throw std::invalid_argument("unknown band '" + std::string(text) + "'");
}

std::string_view to_string(LinkState s)
{
    return kStateNames[static_cast<int>(s)];
}

LinkState parse_link_state(std::string_view text)
{
    for (int i = 0; i < 3; ++i) {
        if (kStateNames[i] == text) {
            return static_cast<LinkState>(i);
        }
    }
    throw std::invalid_argument("unknown link state '" + std::string(text) + "'");
}

BandConfig BandConfig::defaults(Band band)
{
    switch (band) {
    case Band::MmWave38:
        return BandConfig{Band::MmWave38, 800e6, 38e9, 20.0, 9.0, 9.0, 4, 80.0};
    case Band::Ism2_45:
        return BandConfig{Band::Ism2_45, 20e6, 2.45e9, 20.0, 12.0, 0.0, 4, 100.0};
    case Band::Cellular2_1:
        return BandConfig{Band::Cellular2_1, 20e6, 2.1e9, 43.0, 12.0, 0.0, 3,
                          std::numeric_limits<double>::infinity()};
    }
    throw std::invalid_argument("BandConfig::defaults: unknown band");
}

double office_los_breakpoint()
{
    // root of 1.24 - 0.61 log10(d) = 1, where the office formula reaches 1
    return std::pow(10.0, 0.24 / 0.61);
}

double los_probability(Scenario scenario, Environment environment, double d)
{
    d = std::max(d, 0.0);
    double p = 0.0;
    switch (scenario) {
    case Scenario::IndoorA1:
        if (environment == Environment::Office) {
            if (d <= office_los_breakpoint()) {
                p = 1.0;
            } else {
                const double t = 1.24 - 0.61 * std::log10(d);
                p = 1.0 - 0.9 * std::cbrt(1.0 - t * t * t);
            }
        } else {
            p = d <= 10.0 ? 1.0 : std::exp(-(d - 10.0) / 45.0);
        }
        break;
    case Scenario::OutdoorB1:
    case Scenario::BsOutdoorC2: {
        const double e = std::exp(-d / 36.0);
        const double near = d > 0.0 ? std::min(18.0 / d, 1.0) : 1.0;
        p = near * (1.0 - e) + e;
        break;
    }
    case Scenario::IndoorToOutdoorA2:
    case Scenario::OutdoorToIndoorB4:
    case Scenario::BsIndoorC4:
        p = 0.0;
        break;
    }
    return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Parameter set

PathlossParams PathlossParams::defaults()
{
    PathlossParams p;
    auto add = [&](Band b, std::optional<Scenario> s, std::optional<Environment> e, LinkState st,
                   PathlossRow r) { p.rows[RowKey{b, s, e, st}] = r; };
    using S = Scenario;
    using E = Environment;
    using L = LinkState;
    add(Band::MmWave38, std::nullopt, std::nullopt, L::LOS, {2.21, 0, 0, 9.4});
    add(Band::MmWave38, std::nullopt, std::nullopt, L::BLOS, {3.18, 0, 0, 11});
    add(Band::MmWave38, std::nullopt, std::nullopt, L::NLOS, {3.18, 0, 0, 11});
    add(Band::Ism2_45, S::IndoorA1, E::Office, L::LOS, {18.7, 46.8, 20, 3});
    add(Band::Ism2_45, S::IndoorA1, E::Office, L::NLOS, {36.8, 43.8, 20, 6});
    add(Band::Ism2_45, S::IndoorA1, E::Hotspot, L::LOS, {13.9, 64.4, 20, 3});
    add(Band::Ism2_45, S::IndoorA1, E::Hotspot, L::NLOS, {37.8, 36.5, 23, 6});
    add(Band::Ism2_45, S::OutdoorB1, std::nullopt, L::LOS, {40, 19.87, 2.7, 3});
    add(Band::Ism2_45, S::OutdoorB1, std::nullopt, L::NLOS, {43.75, 19.41, 23, 4});
    add(Band::Ism2_45, S::IndoorToOutdoorA2, std::nullopt, L::NLOS, {43.75, 19.41, 23, 7});
    add(Band::Ism2_45, S::OutdoorToIndoorB4, std::nullopt, L::NLOS, {43.75, 19.41, 23, 7});
    add(Band::Cellular2_1, S::BsOutdoorC2, std::nullopt, L::LOS, {26, 39, 20, 4});
    add(Band::Cellular2_1, S::BsOutdoorC2, std::nullopt, L::NLOS, {44.9, 34.46, 23, 8});
    add(Band::Cellular2_1, S::BsIndoorC4, std::nullopt, L::NLOS, {44.9, 34.46, 23, 10});

    p.constants = {
        {"mmwave_d0_m", 5.0},
        {"wall_loss_db", 5.0},
        {"o2i_wall_db", 14.0},
        {"o2i_angle_db", 15.0},
        {"o2i_indoor_db_per_m", 0.5},
        {"c2_los_far_slope", 40.0},
        {"c2_los_far_intercept", 13.47},
        {"c2_los_far_hbs_coef", 14.0},
        {"c2_los_far_hms_coef", 14.0},
        {"c2_los_far_freq_coef", 6.0},
        {"c2_los_far_sigma", 6.0},
        {"c2_nlos_hbs_slope", 6.55},
        {"c2_nlos_hbs_coef", 5.83},
        {"c2_min_distance_m", 10.0},
        {"c4_wall_db", 17.4},
        {"c4_indoor_db_per_m", 0.5},
        {"c4_hms_coef", 0.8},
        {"body_d2d_los", 4.2},
        {"body_d2d_nlos", 3.6},
        {"body_bs_los", 2.3},
        {"body_bs_nlos", 2.2},
        {"noise_figure_db", 6.0},
        {"free_space_floor", 1.0},
        {"min_distance_m", 1.0},
    };
    return p;
}

const PathlossRow& PathlossParams::row(Band band, Scenario scenario, Environment environment,
                                       LinkState state) const
{
    const RowKey candidates[] = {
        {band, scenario, environment, state},
        {band, scenario, std::nullopt, state},
        {band, std::nullopt, environment, state},
        {band, std::nullopt, std::nullopt, state},
    };
    for (const auto& k : candidates) {
        if (auto it = rows.find(k); it != rows.end()) {
            return it->second;
        }
    }
    throw std::out_of_range("no pathloss row for " + std::string(to_string(band)) + "/" +
                            std::string(to_string(scenario)) + "/" +
                            std::string(to_string(environment)) + "/" +
                            std::string(to_string(state)));
}

double PathlossParams::constant(const std::string& name) const
{
    auto it = constants.find(name);
    if (it == constants.end()) {
        throw std::out_of_range("missing channel constant '" + name + "'");
    }
    return it->second;
}

void write_pathloss_params(const PathlossParams& params, std::ostream& out)
{
    out << "version " << params.version << "\n";
    for (const auto& [k, r] : params.rows) {
        out << "row " << to_string(k.band) << ' '
            << (k.scenario ? std::string(to_string(*k.scenario)) : "*") << ' '
            << (k.environment ? std::string(to_string(*k.environment)) : "*") << ' '
            << to_string(k.state) << ' ' << format_double(r.a1) << ' ' << format_double(r.a2)
            << ' ' << format_double(r.a3) << ' ' << format_double(r.sigma) << "\n";
    }
    for (const auto& [name, v] : params.constants) {
        out << "const " << name << ' ' << format_double(v) << "\n";
    }
}

PathlossParams read_pathloss_params(std::istream& in)
{
    PathlossParams p;
    std::string line;
    int lineno = 0;
    bool saw_version = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) {
            tok.push_back(t);
        }
        if (tok.empty()) {
            continue;
        }
        auto fail = [&](const std::string& what) {
            throw std::runtime_error("channel params line " + std::to_string(lineno) + ": " + what);
        };
        try {
            if (tok[0] == "version") {
                if (tok.size() != 2) {
                    fail("expected 'version N'");
                }
                p.version = static_cast<int>(parse_double(tok[1], lineno));
                if (p.version != 1) {
                    fail("unsupported version " + tok[1]);
                }
                saw_version = true;
            } else if (tok[0] == "row") {
                if (tok.size() != 9) {
                    fail("expected 'row band scenario environment state a1 a2 a3 sigma'");
                }
                RowKey k;
                k.band = parse_band(tok[1]);
                if (tok[2] != "*") {
                    k.scenario = parse_scenario(tok[2]);
                }
                if (tok[3] != "*") {
                    k.environment = parse_environment(tok[3]);
                }
                k.state = parse_link_state(tok[4]);
                if (p.rows.count(k) != 0) {
                    fail("duplicate row key");
                }
                p.rows[k] = PathlossRow{parse_double(tok[5], lineno), parse_double(tok[6], lineno),
                                        parse_double(tok[7], lineno), parse_double(tok[8], lineno)};
            } else if (tok[0] == "const") {
                if (tok.size() != 3) {
                    fail("expected 'const name value'");
                }
                p.constants[tok[1]] = parse_double(tok[2], lineno);
            } else {
                fail("unknown directive '" + tok[0] + "'");
            }
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }
    if (!saw_version) {
        throw std::runtime_error("channel params: missing version line");
    }
    return p;
}

PathlossParams load_pathloss_params(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open channel params '" + path + "'");
    }
    return read_pathloss_params(in);
}

void save_pathloss_params(const PathlossParams& params, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write channel params '" + path + "'");
    }
    write_pathloss_params(params, out);
}

// ---------------------------------------------------------------------------
// Evaluation

double free_space_pathloss_db(double d, double carrier_hz)
{
    return 20.0 * std::log10(4.0 * std::numbers::pi * d * carrier_hz / kSpeedOfLight);
}

ChannelModel::ChannelModel(PathlossParams params, double bs_height, double ms_height)
    : params_(std::move(params)), bs_height_(bs_height), ms_height_(ms_height)
{
    const auto& c = params_;
    k_ = Constants{c.constant("mmwave_d0_m"), c.constant("wall_loss_db"), c.constant("o2i_wall_db"),
                   c.constant("o2i_angle_db"), c.constant("o2i_indoor_db_per_m"),
                   c.constant("c2_los_far_slope"), c.constant("c2_los_far_intercept"),
                   c.constant("c2_los_far_hbs_coef"), c.constant("c2_los_far_hms_coef"),
                   c.constant("c2_los_far_freq_coef"), c.constant("c2_los_far_sigma"),
                   c.constant("c2_nlos_hbs_slope"), c.constant("c2_nlos_hbs_coef"),
                   c.constant("c2_min_distance_m"), c.constant("c4_wall_db"),
                   c.constant("c4_indoor_db_per_m"), c.constant("c4_hms_coef"),
                   c.constant("min_distance_m")};
    for (int b = 0; b < 3; ++b) {
        for (int s = 0; s < 6; ++s) {
            for (int e = 0; e < 2; ++e) {
                for (int st = 0; st < 3; ++st) {
                    try {
                        table_[((b * 6 + s) * 2 + e) * 3 + st] =
                            c.row(static_cast<Band>(b), static_cast<Scenario>(s),
                                  static_cast<Environment>(e), static_cast<LinkState>(st));
                    } catch (const std::out_of_range&) {
                    }
                }
            }
        }
    }
    body_ = BodyShadowing{params_.constant("body_d2d_los"), params_.constant("body_d2d_nlos"),
                          params_.constant("body_bs_los"), params_.constant("body_bs_nlos")};
    noise_figure_ = params_.constant("noise_figure_db");
    floor_enabled_ = params_.constant("free_space_floor") != 0.0;
}

const PathlossRow& ChannelModel::row(Band band, Scenario scenario, Environment env,
                                     LinkState state) const
{
    const auto& r = table_[((static_cast<int>(band) * 6 + static_cast<int>(scenario)) * 2 +
                            static_cast<int>(env)) * 3 + static_cast<int>(state)];
    if (!r) {
        return params_.row(band, scenario, env, state); // throws with a descriptive message
    }
    return *r;
}

double ChannelModel::c2_breakpoint(double carrier_hz) const
{
    return 4.0 * (bs_height_ - 1.0) * (ms_height_ - 1.0) * carrier_hz / kSpeedOfLight;
}

double ChannelModel::log_distance(const PathlossRow& r, double d, double fc_ghz) const
{
    return r.a1 * std::log10(d) + r.a2 + r.a3 * std::log10(fc_ghz / 5.0);
}

double ChannelModel::c2_los(double d, double fc_hz, double& sigma) const
{
    const PathlossRow& near =
        row(Band::Cellular2_1, Scenario::BsOutdoorC2, Environment::Office, LinkState::LOS);
    const double fc_ghz = fc_hz / 1e9;
    if (d < c2_breakpoint(fc_hz)) {
        sigma = near.sigma;
        return log_distance(near, d, fc_ghz);
    }
    sigma = k_.c2_los_far_sigma;
    return k_.c2_los_far_slope * std::log10(d) +
           k_.c2_los_far_intercept -
           k_.c2_los_far_hbs_coef * std::log10(bs_height_ - 1.0) -
           k_.c2_los_far_hms_coef * std::log10(ms_height_ - 1.0) +
           k_.c2_los_far_freq_coef * std::log10(fc_ghz / 5.0);
}

double ChannelModel::c2_nlos(double d, double fc_ghz) const
{
    const PathlossRow& r =
        row(Band::Cellular2_1, Scenario::BsOutdoorC2, Environment::Office, LinkState::NLOS);
    const double lh = std::log10(bs_height_);
    return (r.a1 - k_.c2_nlos_hbs_slope * lh) * std::log10(d) + r.a2 +
           k_.c2_nlos_hbs_coef * lh + r.a3 * std::log10(fc_ghz / 5.0);
}

std::optional<PathlossModel> ChannelModel::model(Environment env, const LinkGeometry& g,
                                                 LinkState state, const BandConfig& band,
                                                 bool enforce_range) const
{
    if (enforce_range && g.distance > band.max_range_m) {
        return std::nullopt;
    }
    const double fc_ghz = band.carrier_hz / 1e9;
    const bool bs_link = g.scenario == Scenario::BsOutdoorC2 || g.scenario == Scenario::BsIndoorC4;
    if (bs_link != (band.band == Band::Cellular2_1)) {
        throw std::invalid_argument("pathloss: scenario " + std::string(to_string(g.scenario)) +
                                    " does not match band " + std::string(to_string(band.band)));
    }
    const double d_min = bs_link ? k_.c2_min_distance_m
                                 : k_.min_distance_m;
    const double d = std::max(g.distance, d_min);

    PathlossModel out;
    switch (band.band) {
    case Band::MmWave38: {
        if (state == LinkState::NLOS) {
            return std::nullopt;
        }
        const bool blocked = (g.scenario == Scenario::IndoorA1 && g.walls > 0) ||
                             g.scenario == Scenario::IndoorToOutdoorA2 ||
                             g.scenario == Scenario::OutdoorToIndoorB4 || g.crosses_building;
        if (blocked) {
            return std::nullopt;
        }
        const PathlossRow& r = row(band.band, g.scenario, env, state);
        const double d0 = k_.mmwave_d0_m;
        out.median_db = free_space_pathloss_db(d0, band.carrier_hz) + 10.0 * r.a1 * std::log10(d / d0);
        out.sigma_db = r.sigma;
        break;
    }
    case Band::Ism2_45: {
        if (g.scenario == Scenario::IndoorA1) {
            const PathlossRow& r = row(band.band, g.scenario, env, state);
            out.median_db =
                log_distance(r, d, fc_ghz) + k_.wall_loss_db * g.walls;
            out.sigma_db = r.sigma;
        } else if (g.scenario == Scenario::OutdoorB1) {
            const PathlossRow& r = row(band.band, g.scenario, env, state);
            out.median_db = log_distance(r, d, fc_ghz);
            out.sigma_db = r.sigma;
        } else {
            // outdoor-indoor transitions are always NLOS
            const PathlossRow& r = row(band.band, g.scenario, env, LinkState::NLOS);
            const double c = 1.0 - g.incidence_cos;
            out.median_db = log_distance(r, d, fc_ghz) + k_.o2i_wall_db +
                            k_.o2i_angle_db * c * c +
                            k_.o2i_indoor_db_per_m * g.d_in;
            out.sigma_db = r.sigma;
        }
        break;
    }
    case Band::Cellular2_1: {
        if (g.scenario == Scenario::BsOutdoorC2) {
            if (state == LinkState::LOS) {
                out.median_db = c2_los(d, band.carrier_hz, out.sigma_db);
            } else {
                out.median_db = c2_nlos(d, fc_ghz);
                out.sigma_db = row(band.band, g.scenario, env, LinkState::NLOS)
                                   .sigma;
            }
        } else {
            out.median_db = c2_nlos(d, fc_ghz) + k_.c4_wall_db +
                            k_.c4_indoor_db_per_m * g.d_in -
                            k_.c4_hms_coef * ms_height_;
            out.sigma_db = row(band.band, g.scenario, env, LinkState::NLOS).sigma;
        }
        break;
    }
    }
    out.floor_db = floor_enabled_ ? free_space_pathloss_db(d, band.carrier_hz)
                                  : -std::numeric_limits<double>::infinity();
    return out;
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    if (!(bandwidth_hz > 0.0)) {
        throw std::invalid_argument("noise_power_dbm: bandwidth must be positive");
    }
    return -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

double dbm_to_mw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    return 10.0 * std::log10(mw);
}

double link_capacity(double signal_dbm, double interference_mw, double noise_dbm,
                     double bandwidth_hz)
{
    if (!(bandwidth_hz > 0.0) || interference_mw < 0.0) {
        throw std::invalid_argument("link_capacity: bad bandwidth or interference");
    }
    if (std::isinf(signal_dbm) && signal_dbm < 0.0) {
        return 0.0;
    }
    const double sinr = dbm_to_mw(signal_dbm) / (dbm_to_mw(noise_dbm) + interference_mw);
    return bandwidth_hz * std::log2(1.0 + sinr);
}

} // namespace d2dcache
