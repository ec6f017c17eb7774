// cli.cpp

#include "cli.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sstp/config.hpp"
#include "sstp/estimator.hpp"
#include "sstp/oracle.hpp"
#include "sstp/series_io.hpp"

#ifndef SSTP_VERSION
#define SSTP_VERSION "unknown"
#endif

namespace sstp::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Invocation {
    std::string config_path;
    std::map<std::string, std::string> overrides;
    std::string schemes;
};

void add_key_options(CLI::App& sub, Invocation& inv) {
    sub.add_option("config", inv.config_path, "config file (key = value text or JSON sidecar)");
    for (const std::string& key : Config::known_keys()) {
        sub.add_option_function<std::string>(
            "--" + key, [&inv, key](const std::string& v) { inv.overrides[key] = v; },
            "override config key " + key);
    }
}

Config resolve(const Invocation& inv) {
    Config cfg = inv.config_path.empty() ? Config{} : Config::load(inv.config_path);
    for (const auto& [key, value] : inv.overrides) cfg.set(key, value);
    return cfg;
}

fs::path output_stem(const Config& cfg) {
    fs::path stem = cfg.output();
    if (stem.extension() == ".csv" || stem.extension() == ".json") stem.replace_extension();
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
    return stem;
}

fs::path with_suffix(const fs::path& stem, const std::string& suffix) {
    return fs::path(stem.string() + suffix);
}

json series_summary(const PopulationSeries& s) {
    return json{{"n_used", s.n_used},   {"n_aborted", s.n_aborted},
                {"max_weight", s.max_weight}, {"n_hops", s.n_hops},
                {"n_clamped", s.n_clamped}, {"n_frustrated", s.n_frustrated}};
}

void write_sidecar(const fs::path& path, const Config& cfg, json run) {
    run["version"] = SSTP_VERSION;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << json{{"config", cfg.resolved_json()}, {"run", std::move(run)}}.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int simulate(const Config& cfg, std::ostream& out) {
    const RunConfig rc = cfg.run_config();
    const auto t0 = std::chrono::steady_clock::now();
    const PopulationSeries series = estimate(rc);
    const fs::path stem = output_stem(cfg);
    write_population_csv(with_suffix(stem, ".csv"), series);
    json run = series_summary(series);
    run["command"] = "simulate";
    run["wall_time_s"] = seconds_since(t0);
    write_sidecar(with_suffix(stem, ".json"), cfg, std::move(run));
    out << "wrote " << with_suffix(stem, ".csv").string() << " (" << series.n_used
        << " trajectories, " << series.n_aborted << " aborted)\n";
    return kOk;
}

int compare(const Config& cfg, const std::string& scheme_list, std::ostream& out) {
    std::vector<FilterScheme> schemes;
    std::vector<std::string> specs;
    std::size_t start = 0;
    while (start <= scheme_list.size()) {
        const auto pos = scheme_list.find(',', start);
        const std::string item =
            scheme_list.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
        if (!item.empty()) {
            specs.push_back(item);
            schemes.push_back(parse_scheme(item, cfg));
        }
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (schemes.size() < 2) throw ConfigError("schemes", "compare needs at least two schemes");
    const RunConfig rc = cfg.run_config();
    const auto t0 = std::chrono::steady_clock::now();
    const SchemeComparison cmp = compare_schemes(rc, schemes);
    const fs::path stem = output_stem(cfg);
    json per_scheme = json::array();
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        const fs::path csv =
            with_suffix(stem, "_" + std::to_string(s) + "_" + schemes[s].name() + ".csv");
        write_population_csv(csv, cmp.series[s]);
        json entry = series_summary(cmp.series[s]);
        entry["scheme"] = specs[s];
        entry["csv"] = csv.string();
        per_scheme.push_back(std::move(entry));
        out << "wrote " << csv.string() << '\n';
    }
    write_ratio_csv(with_suffix(stem, "_ratio.csv"), cmp);
    out << "wrote " << with_suffix(stem, "_ratio.csv").string() << '\n';
    json run{{"command", "compare"}, {"schemes", per_scheme}, {"wall_time_s", seconds_since(t0)}};
    write_sidecar(with_suffix(stem, ".json"), cfg, std::move(run));
    return kOk;
}

int oracle(const Config& cfg, std::ostream& out) {
    const OracleConfig oc = cfg.oracle_config();
    const auto t0 = std::chrono::steady_clock::now();
    const PopulationSeries series = exact_population(oc);
    const fs::path stem = output_stem(cfg);
    write_population_csv(with_suffix(stem, ".csv"), series);
    json run{{"command", "oracle"},
             {"n_max", oc.n_max},
             {"n_modes", oc.modes.size()},
             {"wall_time_s", seconds_since(t0)}};
    write_sidecar(with_suffix(stem, ".json"), cfg, std::move(run));
    out << "wrote " << with_suffix(stem, ".csv").string() << '\n';
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sequential short-time propagation for the spin-boson model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SSTP_VERSION);

    Invocation inv;
    CLI::App* sim = app.add_subcommand("simulate", "run one filtering scheme, write CSV + JSON");
    CLI::App* cmp = app.add_subcommand("compare", "run several schemes on the same ensemble");
    CLI::App* orc = app.add_subcommand("oracle", "exact quantum curve for 1-2 bath modes");
    for (CLI::App* sub : {sim, cmp, orc}) add_key_options(*sub, inv);
    cmp->add_option("--schemes", inv.schemes,
                    "comma list of none, observable_cut, transition_filter, combined "
                    "(optionally name:c_t=..:c_E=..)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kConfigError;
    }

    try {
        const Config cfg = resolve(inv);
        if (sim->parsed()) return simulate(cfg, out);
        if (cmp->parsed()) return compare(cfg, inv.schemes, out);
        return oracle(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const AbortFractionExceeded& e) {
        err << "run failed: " << e.what() << '\n';
        return kAbortFraction;
    } catch (const TruncationError& e) {
        err << "oracle failed: " << e.what() << '\n';
        return kTruncation;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace sstp::cli
