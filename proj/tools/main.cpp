#include "d2dcache/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace d2dcache;

namespace {

constexpr int kExitValidation = 2;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string profile;
    int jobs = 1;
    std::vector<std::string> overrides;
};

void print_errors(const std::vector<ValidationError>& errors, std::ostream& os)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : errors) {
        arr.push_back({{"field", e.field}, {"message", e.message}});
    }
    os << nlohmann::json{{"ok", false}, {"errors", arr}}.dump(2) << '\n';
}

// --set key=value; the value is read as JSON when it parses, else as a string
std::string overrides_json(const std::vector<std::string>& sets)
{
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError(std::vector<ValidationError>{{"--set", "expected key=value, got '" + s + "'"}});
        }
        const std::string key = s.substr(0, eq);
        const std::string value = s.substr(eq + 1);
        auto parsed = nlohmann::json::parse(value, nullptr, false);
        obj[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
    }
    return obj.dump();
}

ExperimentConfig build_config(const Options& o)
{
    ExperimentConfig c = o.profile.empty() ? ExperimentConfig{} : ExperimentConfig::profile(o.profile);
    if (!o.config_path.empty()) {
        c = load_config(o.config_path, c);
    }
    if (!o.overrides.empty()) {
        c = config_from_json(overrides_json(o.overrides), c);
    }
    if (o.seed) {
        c.seed = *o.seed;
    }
    if (!o.out_dir.empty()) {
        c.output_dir = o.out_dir;
    }
    if (auto errs = validate(c); !errs.empty()) {
        throw ConfigError(std::move(errs));
    }
    return c;
}

std::string output_path(const ExperimentConfig& c, const std::string& suffix, const std::string& ext)
{
    const std::filesystem::path dir = resolve_output_dir(c.output_dir);
    return (dir / (c.name + suffix + ext)).string();
}

void write_outputs(const ExperimentConfig& c, const ExperimentResult& res, const std::string& suffix)
{
    const std::string csv = output_path(c, suffix, ".csv");
    emit_results(res.rows, OutputFormat::CSV, csv);
    std::cerr << "wrote " << csv << " (" << res.rows.size() << " rows)\n";
    if (c.write_json) {
        const std::string js = output_path(c, suffix, ".json");
        emit_results(res.rows, OutputFormat::JSON, js);
        std::cerr << "wrote " << js << '\n';
    }
    if (c.per_user_dump && !res.users.empty()) {
        const std::string path = output_path(c, suffix + "-users", ".csv");
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + path + "'");
        }
        write_user_csv(res.users, out);
        std::cerr << "wrote " << path << " (" << res.users.size() << " users)\n";
    }
}

bool has_sweep_axis(const ExperimentConfig& c)
{
    return c.n.size() > 1 || c.m.size() > 1 || c.M.size() > 1 || c.band_splits.size() > 1 ||
           c.sides().size() > 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-cell D2D caching network simulator"};
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON experiment configuration");
        sub->add_option("--seed", o.seed, "master seed (overrides the config)");
        sub->add_option("--out", o.out_dir, "output directory (default $D2DCACHE_OUT or ./results)");
        sub->add_option("--profile", o.profile, "base profile")->check(CLI::IsMember({"desk", "paper"}));
        sub->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--set", o.overrides, "override a config field, key=value (repeatable)");
    };
    auto* simulate = app.add_subcommand("simulate", "run the configured schemes once");
    auto* sweep = app.add_subcommand("sweep", "run the cartesian grid of the configured sweep axes");
    auto* analytic = app.add_subcommand("analytic", "emit closed-form scaling-law overlay rows");
    auto* compare = app.add_subcommand("compare", "run d2d, unicast, coded and harmonic on shared realizations");
    auto* validate_cmd = app.add_subcommand("validate", "check a configuration and list every error");
    for (auto* sub : {simulate, sweep, analytic, compare, validate_cmd}) {
        add_common(sub);
    }
    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            try {
                const ExperimentConfig c = build_config(o);
                std::cout << nlohmann::json{{"ok", true}, {"name", c.name}}.dump(2) << '\n';
            } catch (const ConfigError& e) {
                print_errors(e.errors, std::cout);
                return kExitValidation;
            }
            return 0;
        }
        ExperimentConfig c = build_config(o);
        if (analytic->parsed()) {
            const auto rows = analytic_rows(c);
            const std::string path = output_path(c, "-analytic", ".csv");
            emit_results(rows, OutputFormat::CSV, path);
            for (const auto& r : rows) {
                if (r.scheme.find("illustrative") != std::string::npos) {
                    std::cerr << "warning: rows tagged 'illustrative' use placeholder constants "
                                 "(set analytic.A/B/D/a_gamma to replace them)\n";
                    break;
                }
            }
            std::cerr << "wrote " << path << " (" << rows.size() << " rows)\n";
            return 0;
        }
        std::string suffix;
        if (compare->parsed()) {
            c.schemes = {SchemeKind::D2D, SchemeKind::Unicast, SchemeKind::Coded, SchemeKind::Harmonic};
            suffix = "-compare";
        } else if (sweep->parsed()) {
            if (!has_sweep_axis(c)) {
                print_errors({{"sweep", "no axis has more than one value"}}, std::cerr);
                return kExitValidation;
            }
            suffix = "-sweep";
        }
        write_outputs(c, run_experiment(c, o.jobs), suffix);
    } catch (const ConfigError& e) {
        print_errors(e.errors, std::cerr);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
