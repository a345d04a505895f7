#include "d2dcache/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace d2dcache {

namespace {

constexpr std::string_view kVersionLine = "# d2dcache-results v1";
constexpr std::string_view kUserVersionLine = "# d2dcache-users v1";
constexpr std::string_view kUserHeader =
    "scheme,n,m,M,cluster_side,band_split,realization,user,tier,throughput_bps";

std::string fmt(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v)
{
    return v ? fmt(*v) : std::string();
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

template <class T>
T parse_num(std::string_view s, std::string_view what)
{
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw std::runtime_error("bad " + std::string(what) + " value '" + std::string(s) + "'");
    }
    return v;
}

std::optional<double> parse_opt(std::string_view s, std::string_view what)
{
    if (s.empty()) {
        return std::nullopt;
    }
    return parse_num<double>(s, what);
}

std::string_view tier_name(Tier t)
{
    switch (t) {
    case Tier::SelfCache:
        return "self";
    case Tier::MmWave:
        return "mmwave";
    case Tier::Microwave:
        return "uwave";
    case Tier::BaseStation:
        return "bs";
    case Tier::Outage:
        return "outage";
    }
    return "?";
}

Tier parse_tier(std::string_view s)
{
    for (int k = 0; k < kTierCount; ++k) {
        if (s == tier_name(static_cast<Tier>(k))) {
            return static_cast<Tier>(k);
        }
    }
    throw std::runtime_error("bad tier '" + std::string(s) + "'");
}

/// Lines after the version line and header, with the header checked.
std::vector<std::string> body_lines(std::istream& in, std::string_view version,
                                    std::string_view header)
{
    std::string line;
    if (!std::getline(in, line) || line != version) {
        throw std::runtime_error("missing or unsupported version line (expected '" +
                                 std::string(version) + "')");
    }
    if (!std::getline(in, line) || line != header) {
        throw std::runtime_error("unexpected header line");
    }
    std::vector<std::string> out;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            out.push_back(line);
        }
    }
    return out;
}

} // namespace

std::string_view csv_header()
{
    return "schema_version,scheme,environment,n,m,M,gamma_r,cluster_side,band_split,c_r0,p_o,"
           "t_min_bps,tier_self,tier_mmwave,tier_uwave,tier_bs,tier_outage,realizations,seed";
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out)
{
    out << kVersionLine << '\n' << csv_header() << '\n';
    for (const auto& r : rows) {
        out << r.schema_version << ',' << r.scheme << ',' << to_string(r.environment) << ','
            << r.n << ',' << r.m << ',' << r.M << ',' << fmt(r.gamma_r) << ','
            << fmt(r.cluster_side) << ',' << fmt(r.band_split) << ',' << fmt(r.c_r0) << ','
            << fmt(r.p_o) << ',' << fmt(r.t_min_bps);
        for (auto t : r.tiers) {
            out << ',' << t;
        }
        out << ',' << r.realizations << ',' << r.seed << '\n';
    }
}

std::vector<ResultRow> read_csv(std::istream& in)
{
    std::vector<ResultRow> rows;
    int line_no = 2;
    for (const auto& line : body_lines(in, kVersionLine, csv_header())) {
        ++line_no;
        const auto f = split(line);
        if (f.size() != 19) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected 19 fields, got " +
                                     std::to_string(f.size()));
        }
        ResultRow r;
        r.schema_version = parse_num<int>(f[0], "schema_version");
        r.scheme = std::string(f[1]);
        r.environment = parse_environment(f[2]);
        r.n = parse_num<int>(f[3], "n");
        r.m = parse_num<int>(f[4], "m");
        r.M = parse_num<int>(f[5], "M");
        r.gamma_r = parse_num<double>(f[6], "gamma_r");
        r.cluster_side = parse_opt(f[7], "cluster_side");
        r.band_split = parse_opt(f[8], "band_split");
        r.c_r0 = parse_opt(f[9], "c_r0");
        r.p_o = parse_num<double>(f[10], "p_o");
        r.t_min_bps = parse_num<double>(f[11], "t_min_bps");
        for (int k = 0; k < kTierCount; ++k) {
            r.tiers[k] = parse_num<std::int64_t>(f[12 + k], "tier");
        }
        r.realizations = parse_num<int>(f[17], "realizations");
        r.seed = parse_num<std::uint64_t>(f[18], "seed");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string rows_to_json(const std::vector<ResultRow>& rows)
{
    using nlohmann::json;
    json arr = json::array();
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    for (const auto& r : rows) {
        arr.push_back({
            {"schema_version", r.schema_version},
            {"scheme", r.scheme},
            {"environment", std::string(to_string(r.environment))},
            {"n", r.n},
            {"m", r.m},
            {"M", r.M},
            {"gamma_r", r.gamma_r},
            {"cluster_side", opt(r.cluster_side)},
            {"band_split", opt(r.band_split)},
            {"c_r0", opt(r.c_r0)},
            {"p_o", r.p_o},
            {"t_min_bps", r.t_min_bps},
            {"tier_self", r.tiers[0]},
            {"tier_mmwave", r.tiers[1]},
            {"tier_uwave", r.tiers[2]},
            {"tier_bs", r.tiers[3]},
            {"tier_outage", r.tiers[4]},
            {"realizations", r.realizations},
            {"seed", r.seed},
        });
    }
    return arr.dump(2);
}

std::vector<ResultRow> rows_from_json(std::string_view text)
{
    using nlohmann::json;
    const json arr = json::parse(text.begin(), text.end());
    auto opt = [](const json& j) {
        return j.is_null() ? std::nullopt : std::optional<double>(j.get<double>());
    };
    std::vector<ResultRow> rows;
    for (const auto& j : arr) {
        ResultRow r;
        r.schema_version = j.at("schema_version").get<int>();
        r.scheme = j.at("scheme").get<std::string>();
        r.environment = parse_environment(j.at("environment").get<std::string>());
        r.n = j.at("n").get<int>();
        r.m = j.at("m").get<int>();
        r.M = j.at("M").get<int>();
        r.gamma_r = j.at("gamma_r").get<double>();
        r.cluster_side = opt(j.at("cluster_side"));
        r.band_split = opt(j.at("band_split"));
        r.c_r0 = opt(j.at("c_r0"));
        r.p_o = j.at("p_o").get<double>();
        r.t_min_bps = j.at("t_min_bps").get<double>();
        const char* names[] = {"tier_self", "tier_mmwave", "tier_uwave", "tier_bs", "tier_outage"};
        for (int k = 0; k < kTierCount; ++k) {
            r.tiers[k] = j.at(names[k]).get<std::int64_t>();
        }
        r.realizations = j.at("realizations").get<int>();
        r.seed = j.at("seed").get<std::uint64_t>();
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_user_csv(const std::vector<UserSample>& users, std::ostream& out)
{
    out << kUserVersionLine << '\n' << kUserHeader << '\n';
    for (const auto& u : users) {
        out << u.scheme << ',' << u.n << ',' << u.m << ',' << u.M << ',' << fmt(u.cluster_side)
            << ',' << fmt(u.band_split) << ',' << u.realization << ',' << u.user << ','
            << tier_name(u.tier) << ',' << fmt(u.throughput_bps) << '\n';
    }
}

std::vector<UserSample> read_user_csv(std::istream& in)
{
    std::vector<UserSample> out;
    for (const auto& line : body_lines(in, kUserVersionLine, kUserHeader)) {
        const auto f = split(line);
        if (f.size() != 10) {
            throw std::runtime_error("per-user line has " + std::to_string(f.size()) + " fields");
        }
        UserSample u;
        u.scheme = std::string(f[0]);
        u.n = parse_num<int>(f[1], "n");
        u.m = parse_num<int>(f[2], "m");
        u.M = parse_num<int>(f[3], "M");
        u.cluster_side = parse_opt(f[4], "cluster_side");
        u.band_split = parse_opt(f[5], "band_split");
        u.realization = parse_num<int>(f[6], "realization");
        u.user = parse_num<int>(f[7], "user");
        u.tier = parse_tier(f[8]);
        u.throughput_bps = parse_num<double>(f[9], "throughput_bps");
        out.push_back(std::move(u));
    }
    return out;
}

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path)
{
    if (rows.empty()) {
        throw std::runtime_error("emit_results: no rows to write");
    }
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("emit_results: cannot write '" + path + "'");
    }
    if (format == OutputFormat::CSV) {
        write_csv(rows, out);
    } else {
        out << rows_to_json(rows) << '\n';
    }
    if (!out) {
        throw std::runtime_error("emit_results: write to '" + path + "' failed");
    }
}

std::string resolve_output_dir(const std::string& explicit_dir)
{
    if (!explicit_dir.empty()) {
        return explicit_dir;
    }
    if (const char* env = std::getenv("D2DCACHE_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "results";
}

std::vector<SchemePoint> pareto_frontier(std::vector<SchemePoint> points)
{
    std::stable_sort(points.begin(), points.end(), [](const SchemePoint& a, const SchemePoint& b) {
        if (a.p_o != b.p_o) {
            return a.p_o < b.p_o;
        }
        return a.t_min_bps > b.t_min_bps;
    });
    std::vector<SchemePoint> out;
    for (const auto& p : points) {
        if (out.empty() || p.t_min_bps > out.back().t_min_bps) {
            if (!out.empty() && out.back().p_o == p.p_o) {
                continue;
            }
            out.push_back(p);
        }
    }
    return out;
}

std::optional<double> throughput_at_outage(const std::vector<SchemePoint>& points, double target)
{
    const auto f = pareto_frontier(points);
    if (f.empty() || target < f.front().p_o) {
        return std::nullopt;
    }
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (target <= f[i].p_o) {
            const double w = (target - f[i - 1].p_o) / (f[i].p_o - f[i - 1].p_o);
            return f[i - 1].t_min_bps + w * (f[i].t_min_bps - f[i - 1].t_min_bps);
        }
    }
    return f.back().t_min_bps;
}

} // namespace d2dcache
