#include "d2dcache/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace d2dcache {

using nlohmann::json;

std::string_view to_string(SchemeKind s)
{
    switch (s) {
    case SchemeKind::D2D:
        return "d2d";
    case SchemeKind::D2DMultiband:
        return "d2d-multiband";
    case SchemeKind::D2DInband:
        return "d2d-inband";
    case SchemeKind::Unicast:
        return "unicast";
    case SchemeKind::Coded:
        return "coded";
    case SchemeKind::Harmonic:
        return "harmonic";
    }
    return "?";
}

SchemeKind parse_scheme(std::string_view text)
{
    for (auto s : {SchemeKind::D2D, SchemeKind::D2DMultiband, SchemeKind::D2DInband,
                   SchemeKind::Unicast, SchemeKind::Coded, SchemeKind::Harmonic}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

bool is_d2d(SchemeKind s)
{
    return s == SchemeKind::D2D || s == SchemeKind::D2DMultiband || s == SchemeKind::D2DInband;
}

ExperimentConfig ExperimentConfig::profile(std::string_view name)
{
    ExperimentConfig c;
    if (name == "desk") {
        c.name = "desk";
        c.n = {2000};
        c.realizations = 20;
    } else if (name == "paper") {
        c.name = "paper";
        c.n = {10000};
        c.realizations = 10;
    } else {
        throw std::invalid_argument("unknown profile '" + std::string(name) +
                                    "' (expected desk or paper)");
    }
    return c;
}

std::vector<double> ExperimentConfig::sides() const
{
    if (!cluster_sides.empty()) {
        return cluster_sides;
    }
    std::vector<double> out;
    for (int q : cluster_q) {
        out.push_back(cell_side / q);
    }
    return out;
}

std::vector<double> default_c_r0_grid()
{
    // 10 points per decade from 100 kbit/s to 100 Mbit/s
    std::vector<double> g;
    for (int k = 0; k <= 30; ++k) {
        g.push_back(1e5 * std::pow(10.0, k / 10.0));
    }
    return g;
}

ConfigError::ConfigError(std::vector<ValidationError> errs)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& e : errs) {
              msg += "\n  " + e.field + ": " + e.message;
          }
          return msg;
      }()),
      errors(std::move(errs))
{
}

std::vector<ValidationError> validate(const ExperimentConfig& c)
{
    std::vector<ValidationError> errs;
    auto bad = [&](std::string field, std::string msg) {
        errs.push_back({std::move(field), std::move(msg)});
    };
    auto positive_ints = [&](const char* field, const std::vector<int>& v) {
        if (v.empty()) {
            bad(field, "must not be empty");
        }
        for (int x : v) {
            if (x <= 0) {
                bad(field, "values must be positive");
                break;
            }
        }
    };
    if (!(c.cell_side > 0.0)) {
        bad("cell_side", "must be positive");
    }
    positive_ints("n", c.n);
    positive_ints("m", c.m);
    positive_ints("M", c.M);
    for (int M : c.M) {
        for (int m : c.m) {
            if (M > 0 && m > 0 && M >= m) {
                bad("M", "cache size must be smaller than the library size m");
            }
        }
    }
    if (!(c.gamma_r >= 0.0 && c.gamma_r < 1.0)) {
        bad("gamma_r", "must lie in [0, 1)");
    }
    if (c.schemes.empty()) {
        bad("schemes", "must not be empty");
    }
    bool any_d2d = false;
    bool any_multicast = false;
    bool any_unicast = false;
    for (auto s : c.schemes) {
        any_d2d = any_d2d || is_d2d(s);
        any_multicast = any_multicast || s == SchemeKind::Coded || s == SchemeKind::Harmonic;
        any_unicast = any_unicast || s == SchemeKind::Unicast;
    }
    if (any_d2d) {
        if (c.cluster_sides.empty() && c.cluster_q.empty()) {
            bad("cluster_q", "needs cluster_q or cluster_sides for D2D schemes");
        }
        for (int q : c.cluster_q) {
            if (q <= 0) {
                bad("cluster_q", "values must be positive");
                break;
            }
        }
        for (double s : c.cluster_sides) {
            if (!(s > 0.0) || s > c.cell_side) {
                bad("cluster_sides", "values must lie in (0, cell_side]");
                break;
            }
        }
        const auto k = static_cast<int>(std::lround(std::sqrt(std::max(c.d2d_reuse, 0))));
        if (c.d2d_reuse < 1 || k * k != c.d2d_reuse) {
            bad("d2d_reuse", "must be a perfect square");
        }
    }
    if (any_multicast) {
        for (double r : c.c_r0_grid) {
            if (!(r > 0.0)) {
                bad("c_r0_grid", "values must be positive");
                break;
            }
        }
        if (c.mc_samples <= 0) {
            bad("mc_samples", "must be positive");
        }
    }
    if (any_unicast) {
        if (c.p_o_grid.empty()) {
            bad("p_o_grid", "must not be empty for unicast");
        }
        for (double p : c.p_o_grid) {
            if (!(p > 0.0 && p < 1.0)) {
                bad("p_o_grid", "values must lie in (0, 1)");
                break;
            }
        }
    }
    for (double b : c.band_splits) {
        if (!(b > 0.0 && b <= 1.0)) {
            bad("band_splits", "values must lie in (0, 1]");
            break;
        }
    }
    if (c.band_splits.empty()) {
        bad("band_splits", "must not be empty");
    }
    if (!(c.harmonic.file_bits > 0.0)) {
        bad("harmonic.file_bits", "must be positive");
    }
    if (c.harmonic.blocks < 1) {
        bad("harmonic.blocks", "must be at least 1");
    }
    if (!(c.harmonic.rate_bps > 0.0)) {
        bad("harmonic.rate_bps", "must be positive");
    }
    if (!(c.threshold_bps > 0.0)) {
        bad("threshold_bps", "must be positive");
    }
    if (!(c.playback_cap_bps >= c.threshold_bps)) {
        bad("playback_cap_bps", "must be at least threshold_bps");
    }
    if (c.realizations <= 0) {
        bad("realizations", "must be positive");
    }
    if (c.bs_budget < 0) {
        bad("bs_budget", "must be non-negative");
    }
    if (c.rounds < 0) {
        bad("rounds", "must be non-negative");
    }
    if (!c.channel_params.empty() && !std::ifstream(c.channel_params)) {
        bad("channel_params", "cannot open '" + c.channel_params + "'");
    }
    const auto& a = c.analytic;
    if (!(a.link_rate > 0.0)) {
        bad("analytic.link_rate", "must be positive");
    }
    if (a.reuse < 1) {
        bad("analytic.reuse", "must be positive");
    }
    return errs;
}

namespace {

json opt(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::vector<T> scalar_or_list(const json& j)
{
    if (j.is_array()) {
        return j.get<std::vector<T>>();
    }
    return {j.get<T>()};
}

using Setter = std::function<void(const json&)>;

void apply(const json& obj, const std::map<std::string, Setter>& setters, const std::string& prefix,
           std::vector<ValidationError>& errs)
{
    if (!obj.is_object()) {
        errs.push_back({prefix.empty() ? "<root>" : prefix, "must be an object"});
        return;
    }
    for (const auto& [key, value] : obj.items()) {
        const std::string field = prefix.empty() ? key : prefix + "." + key;
        auto it = setters.find(key);
        if (it == setters.end()) {
            errs.push_back({field, "unknown key"});
            continue;
        }
        try {
            it->second(value);
        } catch (const std::exception& e) {
            errs.push_back({field, e.what()});
        }
    }
}

} // namespace

std::string config_to_json(const ExperimentConfig& c)
{
    json schemes = json::array();
    for (auto s : c.schemes) {
        schemes.push_back(std::string(to_string(s)));
    }
    const auto& a = c.analytic;
    json j = {
        {"name", c.name},
        {"environment", std::string(to_string(c.environment))},
        {"cell_side", c.cell_side},
        {"n", c.n},
        {"m", c.m},
        {"M", c.M},
        {"gamma_r", c.gamma_r},
        {"placement", std::string(to_string(c.placement))},
        {"schemes", schemes},
        {"cluster_q", c.cluster_q},
        {"cluster_sides", c.cluster_sides},
        {"d2d_reuse", c.d2d_reuse},
        {"c_r0_grid", c.c_r0_grid},
        {"p_o_grid", c.p_o_grid},
        {"harmonic",
         {{"file_bits", c.harmonic.file_bits},
          {"blocks", c.harmonic.blocks},
          {"rate_bps", c.harmonic.rate_bps}}},
        {"threshold_bps", c.threshold_bps},
        {"playback_cap_bps", c.playback_cap_bps},
        {"realizations", c.realizations},
        {"seed", c.seed},
        {"band_splits", c.band_splits},
        {"bs_budget", c.bs_budget},
        {"mc_samples", c.mc_samples},
        {"rounds", c.rounds},
        {"throughput_mode", std::string(to_string(c.throughput_mode))},
        {"admission", std::string(to_string(c.admission))},
        {"exponent_mode", std::string(to_string(c.exponent_mode))},
        {"channel_params", c.channel_params},
        {"output_dir", c.output_dir},
        {"write_json", c.write_json},
        {"per_user_dump", c.per_user_dump},
        {"analytic",
         {{"link_rate", a.link_rate},
          {"reuse", a.reuse},
          {"rho1_grid", a.rho1_grid},
          {"g_c_grid", a.g_c_grid},
          {"rho2_grid", a.rho2_grid},
          {"include_r4", a.include_r4},
          {"A", opt(a.A)},
          {"B", opt(a.B)},
          {"D", opt(a.D)},
          {"a_gamma", opt(a.a_gamma)},
          {"illustrative_constants", a.illustrative_constants}}},
    };
    return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text, const ExperimentConfig& base)
{
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::vector<ValidationError>{{"<root>", e.what()}});
    }
    ExperimentConfig c = base;
    std::vector<ValidationError> errs;
    if (root.is_object() && root.contains("profile")) {
        try {
            c = ExperimentConfig::profile(root.at("profile").get<std::string>());
        } catch (const std::exception& e) {
            errs.push_back({"profile", e.what()});
        }
    }
    auto set_opt = [](std::optional<double>& dst) {
        return [&dst](const json& j) {
            dst = j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
        };
    };
    std::map<std::string, Setter> harmonic = {
        {"file_bits", [&](const json& j) { c.harmonic.file_bits = j.get<double>(); }},
        {"blocks", [&](const json& j) { c.harmonic.blocks = j.get<int>(); }},
        {"rate_bps", [&](const json& j) { c.harmonic.rate_bps = j.get<double>(); }},
    };
    auto& a = c.analytic;
    std::map<std::string, Setter> analytic = {
        {"link_rate", [&](const json& j) { a.link_rate = j.get<double>(); }},
        {"reuse", [&](const json& j) { a.reuse = j.get<int>(); }},
        {"rho1_grid", [&](const json& j) { a.rho1_grid = j.get<std::vector<double>>(); }},
        {"g_c_grid", [&](const json& j) { a.g_c_grid = j.get<std::vector<double>>(); }},
        {"rho2_grid", [&](const json& j) { a.rho2_grid = j.get<std::vector<double>>(); }},
        {"include_r4", [&](const json& j) { a.include_r4 = j.get<bool>(); }},
        {"A", set_opt(a.A)},
        {"B", set_opt(a.B)},
        {"D", set_opt(a.D)},
        {"a_gamma", set_opt(a.a_gamma)},
        {"illustrative_constants", [&](const json& j) { a.illustrative_constants = j.get<bool>(); }},
    };
    std::map<std::string, Setter> top = {
        {"profile", [](const json&) {}},
        {"name", [&](const json& j) { c.name = j.get<std::string>(); }},
        {"environment", [&](const json& j) { c.environment = parse_environment(j.get<std::string>()); }},
        {"cell_side", [&](const json& j) { c.cell_side = j.get<double>(); }},
        {"n", [&](const json& j) { c.n = scalar_or_list<int>(j); }},
        {"m", [&](const json& j) { c.m = scalar_or_list<int>(j); }},
        {"M", [&](const json& j) { c.M = scalar_or_list<int>(j); }},
        {"gamma_r", [&](const json& j) { c.gamma_r = j.get<double>(); }},
        {"placement", [&](const json& j) { c.placement = parse_placement(j.get<std::string>()); }},
        {"schemes",
         [&](const json& j) {
             c.schemes.clear();
             for (const auto& s : scalar_or_list<std::string>(j)) {
                 c.schemes.push_back(parse_scheme(s));
             }
         }},
        {"cluster_q", [&](const json& j) { c.cluster_q = scalar_or_list<int>(j); }},
        {"cluster_sides", [&](const json& j) { c.cluster_sides = scalar_or_list<double>(j); }},
        {"d2d_reuse", [&](const json& j) { c.d2d_reuse = j.get<int>(); }},
        {"c_r0_grid", [&](const json& j) { c.c_r0_grid = scalar_or_list<double>(j); }},
        {"p_o_grid", [&](const json& j) { c.p_o_grid = scalar_or_list<double>(j); }},
        {"harmonic", [&](const json& j) { apply(j, harmonic, "harmonic", errs); }},
        {"threshold_bps", [&](const json& j) { c.threshold_bps = j.get<double>(); }},
        {"playback_cap_bps", [&](const json& j) { c.playback_cap_bps = j.get<double>(); }},
        {"realizations", [&](const json& j) { c.realizations = j.get<int>(); }},
        {"seed", [&](const json& j) { c.seed = j.get<std::uint64_t>(); }},
        {"band_splits", [&](const json& j) { c.band_splits = scalar_or_list<double>(j); }},
        {"bs_budget", [&](const json& j) { c.bs_budget = j.get<int>(); }},
        {"mc_samples", [&](const json& j) { c.mc_samples = j.get<int>(); }},
        {"rounds", [&](const json& j) { c.rounds = j.get<int>(); }},
        {"throughput_mode",
         [&](const json& j) { c.throughput_mode = parse_throughput_mode(j.get<std::string>()); }},
        {"admission",
         [&](const json& j) { c.admission = link_admission_from_string(j.get<std::string>()); }},
        {"exponent_mode",
         [&](const json& j) { c.exponent_mode = parse_exponent_mode(j.get<std::string>()); }},
        {"channel_params", [&](const json& j) { c.channel_params = j.get<std::string>(); }},
        {"output_dir", [&](const json& j) { c.output_dir = j.get<std::string>(); }},
        {"write_json", [&](const json& j) { c.write_json = j.get<bool>(); }},
        {"per_user_dump", [&](const json& j) { c.per_user_dump = j.get<bool>(); }},
        {"analytic", [&](const json& j) { apply(j, analytic, "analytic", errs); }},
    };
    apply(root, top, "", errs);
    if (!errs.empty()) {
        // report field-level problems of the partially applied config as well
        for (auto& e : validate(c)) {
            errs.push_back(std::move(e));
        }
        throw ConfigError(std::move(errs));
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(std::vector<ValidationError>{{"config", "cannot open '" + path + "'"}});
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), base);
}

} // namespace d2dcache
