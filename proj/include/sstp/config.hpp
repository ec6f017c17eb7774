// config.hpp: flat key = value run configuration and its JSON sidecar form
//
// Keys: omega xi beta n_modes omega_max mass mode_freqs mode_couplings tau
// t_max max_hops n_traj scheme c_t c_E seed workers output stride pairs n_max.
// Defaults: n_modes = 200, omega_max = 3, mass = 1, scheme = none, seed = 0,
// workers = $SSTP_WORKERS or the hardware thread count, output = sstp_run,
// stride = 1, pairs = uniform, n_max = 30. Doubles accept a/b fractions.

#pragma once

#include "json.hpp"

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sstp/estimator.hpp"
#include "sstp/filters.hpp"
#include "sstp/oracle.hpp"

namespace sstp {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class Config {
public:
    static const std::vector<std::string>& known_keys();

    // key = value lines; '#' starts a comment.
    static Config parse_text(std::string_view text);
    // Either the flat text format or a JSON sidecar ({"config": {...}}).
    static Config load(const std::filesystem::path& path);
    static Config from_json(const nlohmann::json& j);

    // Rejects unknown keys; overwrites an existing value.
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    RunConfig run_config() const;
    OracleConfig oracle_config() const;
    FilterScheme scheme() const;
    std::string output() const;

    // All keys with defaults applied, typed.
    nlohmann::json resolved_json() const;

    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;

private:
    std::map<std::string, std::string> values_;
};

// `name` or `name:c_t=..:c_E=..`; constants default to the config's.
FilterScheme parse_scheme(std::string_view spec, const Config& defaults);

}  // namespace sstp
