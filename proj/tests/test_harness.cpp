#include "d2dcache/harness.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace d2dcache;

namespace {

ExperimentConfig small()
{
    ExperimentConfig c;
    c.name = "small";
    c.n = {300};
    c.m = {60};
    c.M = {4};
    c.cluster_q = {4, 6};
    c.realizations = 3;
    c.schemes = {SchemeKind::D2D, SchemeKind::Unicast, SchemeKind::Coded};
    c.p_o_grid = {0.05, 0.2};
    c.c_r0_grid = {1e5, 1e6, 1e7};
    c.mc_samples = 50;
    return c;
}

} // namespace

TEST_CASE("csv layout")
{
    ResultRow r;
    r.scheme = "d2d";
    r.n = 2000;
    r.m = 300;
    r.M = 20;
    r.gamma_r = 0.4;
    r.cluster_side = 150.0;
    r.p_o = 0.125;
    r.t_min_bps = 250000.5;
    r.tiers = {1, 0, 2, 0, 5};
    r.realizations = 2;
    r.seed = 7;
    std::ostringstream out;
    write_csv({r}, out);
    CHECK(out.str() ==
          "# d2dcache-results v1\n"
          "schema_version,scheme,environment,n,m,M,gamma_r,cluster_side,band_split,c_r0,p_o,"
          "t_min_bps,tier_self,tier_mmwave,tier_uwave,tier_bs,tier_outage,realizations,seed\n"
          "1,d2d,office,2000,300,20,0.4,150,,,0.125,250000.5,1,0,2,0,5,2,7\n");

    std::istringstream in(out.str());
    const auto back = read_csv(in);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);

    std::istringstream wrong("# d2dcache-results v2\n");
    CHECK_THROWS_WITH(read_csv(wrong), doctest::Contains("version"));
    std::istringstream short_row(std::string("# d2dcache-results v1\n") + std::string(csv_header()) +
                                 "\n1,d2d\n");
    CHECK_THROWS_WITH(read_csv(short_row), doctest::Contains("line 3"));
}

TEST_CASE("experiment rows survive csv and json round trips")
{
    const ExperimentResult res = run_experiment(small());
    // d2d: 2 sides; unicast: 2 targets; coded: 3 rates
    REQUIRE(res.rows.size() == 7);
    std::stringstream ss;
    write_csv(res.rows, ss);
    const auto csv = read_csv(ss);
    CHECK(csv == res.rows);
    CHECK(rows_from_json(rows_to_json(csv)) == res.rows);
    for (const auto& r : res.rows) {
        CHECK(r.p_o >= 0.0);
        CHECK(r.p_o <= 1.0);
        CHECK(r.realizations == 3);
        std::int64_t total = 0;
        for (auto t : r.tiers) {
            total += t;
        }
        CHECK(total == 3 * 300);
        CHECK(r.cluster_side.has_value() == (r.scheme == "d2d"));
        CHECK(r.c_r0.has_value() == (r.scheme == "coded"));
    }
}

TEST_CASE("thread count does not change results")
{
    ExperimentConfig c = small();
    c.per_user_dump = true;
    const ExperimentResult one = run_experiment(c, 1);
    const ExperimentResult four = run_experiment(c, 4);
    CHECK(one.rows == four.rows);
    CHECK(one.users == four.users);
    // one entry per user, realization and D2D sweep point
    CHECK(one.users.size() == 300u * 3u * 2u);
    std::stringstream ss;
    write_user_csv(one.users, ss);
    CHECK(read_user_csv(ss) == one.users);
}

TEST_CASE("realizations share seeds across schemes")
{
    ExperimentConfig a = small();
    a.schemes = {SchemeKind::D2D};
    ExperimentConfig b = small();
    const auto ra = run_experiment(a).rows;
    const auto rb = run_experiment(b).rows;
    CHECK(ra[0] == rb[0]);
    CHECK(ra[1] == rb[1]);
    CHECK(realization_seed(1, 0) != realization_seed(1, 1));
    CHECK(realization_seed(1, 0) != realization_seed(2, 0));
}

TEST_CASE("config json round trip and overrides")
{
    ExperimentConfig c = small();
    c.analytic.A = 0.5;
    c.environment = Environment::Hotspot;
    c.admission = LinkAdmission::AllLinks;
    CHECK(config_from_json(config_to_json(c)) == c);

    const ExperimentConfig d = config_from_json(R"({"profile": "desk", "M": 10, "schemes": "coded"})");
    CHECK(d.n == std::vector<int>{2000});
    CHECK(d.realizations == 20);
    CHECK(d.M == std::vector<int>{10});
    CHECK(d.schemes == std::vector<SchemeKind>{SchemeKind::Coded});
    CHECK(ExperimentConfig::profile("paper").n == std::vector<int>{10000});
}

TEST_CASE("validation lists every problem")
{
    ExperimentConfig c;
    c.gamma_r = 1.5;
    c.realizations = 0;
    c.M = {400};
    const auto errs = validate(c);
    CHECK(errs.size() >= 3);
    auto has = [&](const std::string& f) {
        for (const auto& e : errs) {
            if (e.field == f) {
                return true;
            }
        }
        return false;
    };
    CHECK(has("gamma_r"));
    CHECK(has("realizations"));
    CHECK(has("M"));
    CHECK_THROWS_AS(run_experiment(c), ConfigError);

    try {
        config_from_json(R"({"bogus": 1, "gamma_r": -1})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.errors.size() >= 2);
    }
    CHECK(validate(ExperimentConfig{}).empty());
}

TEST_CASE("pareto frontier and fixed-outage throughput")
{
    std::vector<SchemePoint> pts(5);
    pts[0].p_o = 0.1;
    pts[0].t_min_bps = 10;
    pts[1].p_o = 0.2;
    pts[1].t_min_bps = 8; // dominated
    pts[2].p_o = 0.3;
    pts[2].t_min_bps = 30;
    pts[3].p_o = 0.3;
    pts[3].t_min_bps = 20;
    pts[4].p_o = 0.5;
    pts[4].t_min_bps = 50;
    const auto f = pareto_frontier(pts);
    REQUIRE(f.size() == 3);
    CHECK(f[0].t_min_bps == 10);
    CHECK(f[1].t_min_bps == 30);
    CHECK(f[2].t_min_bps == 50);
    CHECK_FALSE(throughput_at_outage(pts, 0.05));
    CHECK(*throughput_at_outage(pts, 0.2) == doctest::Approx(20.0));
    CHECK(*throughput_at_outage(pts, 0.4) == doctest::Approx(40.0));
    CHECK(*throughput_at_outage(pts, 0.9) == 50.0);
}

TEST_CASE("analytic rows")
{
    ExperimentConfig c;
    c.analytic.g_c_grid = {1.0, 2.0, 100.0};
    const auto rows = analytic_rows(c);
    int r1 = 0;
    int r2 = 0;
    for (const auto& r : rows) {
        r1 += r.scheme == "analytic-r1";
        r2 += r.scheme == "analytic-r2-illustrative";
        CHECK(r.realizations == 0);
    }
    CHECK(r1 == 9);
    CHECK(r2 == 2);
    c.analytic.A = 2.0;
    bool plain = false;
    for (const auto& r : analytic_rows(c)) {
        plain = plain || r.scheme == "analytic-r2";
    }
    CHECK(plain);
}

TEST_CASE("output location and emission")
{
    CHECK(resolve_output_dir("x") == "x");
    const auto dir = std::filesystem::temp_directory_path() / "d2dcache-test-out" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    ResultRow r;
    r.scheme = "unicast";
    const std::string path = (dir / "a.csv").string();
    emit_results({r}, OutputFormat::CSV, path);
    std::ifstream in(path);
    CHECK(read_csv(in).size() == 1);
    emit_results({r}, OutputFormat::JSON, (dir / "a.json").string());
    CHECK(std::filesystem::exists(dir / "a.json"));
    CHECK_THROWS(emit_results({}, OutputFormat::CSV, path));
    std::filesystem::remove_all(dir.parent_path());
}
