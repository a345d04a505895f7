#include "d2dcache/bs_schemes.hpp"
#include "d2dcache/channel.hpp"
#include "d2dcache/content.hpp"
#include "d2dcache/d2d_sim.hpp"
#include "d2dcache/harness.hpp"
#include "d2dcache/scaling_laws.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace d2dcache;

namespace {

py::dict row_to_dict(const ResultRow& r)
{
    py::dict d;
    auto opt = [](const std::optional<double>& v) -> py::object {
        return v ? py::object(py::float_(*v)) : py::object(py::none());
    };
    d["schema_version"] = r.schema_version;
    d["scheme"] = r.scheme;
    d["environment"] = std::string(to_string(r.environment));
    d["n"] = r.n;
    d["m"] = r.m;
    d["M"] = r.M;
    d["gamma_r"] = r.gamma_r;
    d["cluster_side"] = opt(r.cluster_side);
    d["band_split"] = opt(r.band_split);
    d["c_r0"] = opt(r.c_r0);
    d["p_o"] = r.p_o;
    d["t_min_bps"] = r.t_min_bps;
    d["tier_self"] = r.tiers[0];
    d["tier_mmwave"] = r.tiers[1];
    d["tier_uwave"] = r.tiers[2];
    d["tier_bs"] = r.tiers[3];
    d["tier_outage"] = r.tiers[4];
    d["realizations"] = r.realizations;
    d["seed"] = r.seed;
    return d;
}

ExperimentConfig parse_config(const std::string& json, const std::string& profile)
{
    const ExperimentConfig base =
        profile.empty() ? ExperimentConfig{} : ExperimentConfig::profile(profile);
    return json.empty() ? base : config_from_json(json, base);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Single-cell D2D caching network simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("coded_multicast_ntx", &coded_multicast_ntx, py::arg("n"), py::arg("m"), py::arg("M"));
    m.def("analytic_reuse_factor", &analytic_reuse_factor, py::arg("delta"));
    m.def("scaling_alpha", &scaling_alpha, py::arg("gamma"));
    m.def("noise_power_dbm", &noise_power_dbm, py::arg("bandwidth_hz"),
          py::arg("noise_figure_db") = 6.0);
    m.def("free_space_pathloss_db", &free_space_pathloss_db, py::arg("d"), py::arg("carrier_hz"));
    m.def(
        "los_probability",
        [](const std::string& scenario, const std::string& environment, double d) {
            return los_probability(parse_scenario(scenario), parse_environment(environment), d);
        },
        py::arg("scenario"), py::arg("environment"), py::arg("d"));
    m.def(
        "zipf_pmf", [](int m_, double gamma) { return zipf_pmf(m_, gamma).pmf; }, py::arg("m"),
        py::arg("gamma"));
    m.def(
        "optimal_cache_distribution",
        [](int m_, double gamma, int M, double g_c, const std::string& mode) {
            const ZipfDemand d = zipf_pmf(m_, gamma);
            const CachingDistribution c = optimal_cache_distribution(d, M, g_c, parse_exponent_mode(mode));
            py::dict out;
            out["pc"] = c.pc;
            out["support"] = c.support;
            out["nu"] = c.nu;
            out["hit_probability"] = cluster_hit_probability(c, d);
            return out;
        },
        py::arg("m"), py::arg("gamma"), py::arg("M"), py::arg("g_c"), py::arg("mode") = "paper");

    m.def(
        "default_config",
        [](const std::string& profile) {
            return config_to_json(profile.empty() ? ExperimentConfig{} : ExperimentConfig::profile(profile));
        },
        py::arg("profile") = "", "Config as a JSON string, optionally from a named profile.");
    m.def(
        "validate_config",
        [](const std::string& json, const std::string& profile) {
            py::list errs;
            try {
                for (const auto& e : validate(parse_config(json, profile))) {
                    errs.append(py::make_tuple(e.field, e.message));
                }
            } catch (const ConfigError& e) {
                for (const auto& v : e.errors) {
                    errs.append(py::make_tuple(v.field, v.message));
                }
            }
            return errs;
        },
        py::arg("config_json"), py::arg("profile") = "");
    m.def(
        "run_experiment",
        [](const std::string& json, const std::string& profile, int jobs) {
            const ExperimentConfig c = parse_config(json, profile);
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(c, jobs);
            }
            py::list rows;
            for (const auto& r : res.rows) {
                rows.append(row_to_dict(r));
            }
            return rows;
        },
        py::arg("config_json") = "", py::arg("profile") = "", py::arg("jobs") = 1,
        "Runs the sweep and returns one dict per result row.");
    m.def(
        "run_experiment_csv",
        [](const std::string& json, const std::string& profile, int jobs) {
            const ExperimentConfig c = parse_config(json, profile);
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_experiment(c, jobs);
            }
            std::ostringstream out;
            write_csv(res.rows, out);
            return out.str();
        },
        py::arg("config_json") = "", py::arg("profile") = "", py::arg("jobs") = 1,
        "Runs the sweep and returns the results CSV text.");
    m.def(
        "analytic_rows",
        [](const std::string& json, const std::string& profile) {
            py::list rows;
            for (const auto& r : analytic_rows(parse_config(json, profile))) {
                rows.append(row_to_dict(r));
            }
            return rows;
        },
        py::arg("config_json") = "", py::arg("profile") = "");
    m.def(
        "throughput_at_outage",
        [](const std::vector<std::pair<double, double>>& points, double target) {
            std::vector<SchemePoint> pts;
            for (const auto& [p, t] : points) {
                SchemePoint s;
                s.p_o = p;
                s.t_min_bps = t;
                pts.push_back(s);
            }
            return throughput_at_outage(pts, target);
        },
        py::arg("points"), py::arg("target"),
        "points are (p_o, t_min_bps) pairs; None below the smallest outage.");
    m.attr("SCHEMA_VERSION") = kSchemaVersion;
    m.attr("CSV_HEADER") = std::string(csv_header());
}
