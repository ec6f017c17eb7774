// config.cpp

#include "sstp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace sstp {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_plain_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s == "inf" || s == "+inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        if (parse_plain_double(text, v)) return v;
    } else {
        double num = 0.0;
        double den = 0.0;
        if (parse_plain_double(trim(text.substr(0, slash)), num) &&
            parse_plain_double(trim(text.substr(slash + 1)), den) && den != 0.0) {
            return num / den;
        }
    }
    throw ConfigError(key, "expected a number, got '" + text + "'");
}

long long parse_int(const std::string& key, const std::string& text) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "expected an integer, got '" + text + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split(text, ',')) out.push_back(parse_double(key, item));
    return out;
}

unsigned default_workers() {
    if (const char* env = std::getenv("SSTP_WORKERS")) {
        long long v = 0;
        const std::string s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && v >= 1) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

const std::vector<std::string> kDoubleKeys = {"omega", "xi",  "beta", "omega_max", "mass",
                                              "tau",   "t_max", "c_t",  "c_E"};
const std::vector<std::string> kIntKeys = {"n_modes", "max_hops", "n_traj", "seed",
                                           "workers", "stride",   "n_max"};

bool contains(const std::vector<std::string>& v, const std::string& k) {
    return std::find(v.begin(), v.end(), k) != v.end();
}

}  // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys = {
        "omega",  "xi",       "beta",  "n_modes", "omega_max", "mass",       "mode_freqs",
        "mode_couplings", "tau", "t_max", "max_hops", "n_traj", "scheme", "c_t",
        "c_E",    "seed",     "workers", "output", "stride",   "pairs",      "n_max"};
    return keys;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!contains(known_keys(), key)) throw ConfigError(key, "unknown key");
    values_[key] = trim(value);
}

Config Config::parse_text(std::string_view text) {
    Config cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(body, "line " + std::to_string(lineno) + " is not key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (cfg.has(key)) throw ConfigError(key, "duplicate key");
        cfg.set(key, body.substr(eq + 1));
    }
    return cfg;
}

Config Config::from_json(const nlohmann::json& j) {
    const nlohmann::json& body = j.contains("config") ? j.at("config") : j;
    if (!body.is_object()) throw ConfigError("config", "JSON config must be an object");
    Config cfg;
    for (const auto& [key, value] : body.items()) {
        if (value.is_string()) {
            cfg.set(key, value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ",";
                joined += item.dump();
            }
            cfg.set(key, joined);
        } else if (value.is_number()) {
            cfg.set(key, value.dump());
        } else {
            throw ConfigError(key, "unsupported JSON value");
        }
    }
    return cfg;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const std::string head = trim(text);
    if (!head.empty() && head.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        return from_json(j);
    }
    return parse_text(text);
}

double Config::get_double(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing required key");
    return parse_double(key, it->second);
}

long long Config::get_int(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError(key, "missing required key");
    return parse_int(key, it->second);
}

FilterScheme Config::scheme() const {
    return parse_scheme(has("scheme") ? values_.at("scheme") : "none", *this);
}

std::string Config::output() const {
    return has("output") ? values_.at("output") : std::string("sstp_run");
}

FilterScheme parse_scheme(std::string_view spec, const Config& defaults) {
    const std::vector<std::string> parts = split(spec, ':');
    const std::string& name = parts.front();
    Config local;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        const std::string key = eq == std::string::npos ? parts[i] : trim(parts[i].substr(0, eq));
        if (key != "c_t" && key != "c_E") throw ConfigError("scheme", "unknown parameter '" + key + "'");
        if (eq == std::string::npos) throw ConfigError(key, "expected key=value");
        local.set(key, parts[i].substr(eq + 1));
    }
    auto constant = [&](const std::string& key) {
        const double v = local.has(key) ? local.get_double(key) : defaults.get_double(key);
        if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
        return v;
    };
    if (name == "none") return FilterScheme::none();
    if (name == "observable_cut") return FilterScheme::observable_cut(constant("c_t"));
    if (name == "transition_filter") return FilterScheme::transition_filter(constant("c_E"));
    if (name == "combined") return FilterScheme::combined(constant("c_t"), constant("c_E"));
    throw ConfigError("scheme", "unknown scheme '" + name +
                                    "' (none, observable_cut, transition_filter, combined)");
}

namespace {

// Bath from mode_freqs/mode_couplings if given, otherwise nullopt.
std::optional<std::vector<BathMode>> explicit_modes(const Config& c, double mass) {
    const bool has_f = c.has("mode_freqs");
    const bool has_c = c.has("mode_couplings");
    if (!has_f && !has_c) return std::nullopt;
    if (!has_f) throw ConfigError("mode_freqs", "required with mode_couplings");
    if (!has_c) throw ConfigError("mode_couplings", "required with mode_freqs");
    const auto f = parse_list("mode_freqs", c.values().at("mode_freqs"));
    const auto g = parse_list("mode_couplings", c.values().at("mode_couplings"));
    if (f.size() != g.size()) throw ConfigError("mode_couplings", "length differs from mode_freqs");
    if (c.has("n_modes") && static_cast<std::size_t>(c.get_int("n_modes")) != f.size()) {
        throw ConfigError("n_modes", "disagrees with the length of mode_freqs");
    }
    std::vector<BathMode> modes;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (!(f[j] > 0.0)) throw ConfigError("mode_freqs", "frequencies must be > 0");
        modes.push_back(BathMode{f[j], g[j], mass});
    }
    return modes;
}

ModelParams model_params(const Config& c, bool need_xi) {
    ModelParams m;
    m.omega = c.get_double("omega");
    m.beta = c.get_double("beta");
    m.xi = need_xi ? c.get_double("xi") : (c.has("xi") ? c.get_double("xi") : 0.0);
    if (c.has("n_modes")) {
        const long long n = c.get_int("n_modes");
        if (n < 1) throw ConfigError("n_modes", "must be >= 1");
        m.n_modes = static_cast<std::size_t>(n);
    }
    if (c.has("omega_max")) m.omega_max = c.get_double("omega_max");
    if (c.has("mass")) m.mass = c.get_double("mass");
    try {
        m.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        throw ConfigError(what.substr(0, what.find_first_of(" :")), what);
    }
    return m;
}

}  // namespace

RunConfig Config::run_config() const {
    RunConfig rc;
    const bool has_modes = has("mode_freqs") || has("mode_couplings");
    rc.model = model_params(*this, !has_modes);
    rc.modes = explicit_modes(*this, rc.model.mass);
    if (rc.modes) rc.model.n_modes = rc.modes->size();
    rc.tau = get_double("tau");
    rc.t_max = get_double("t_max");
    rc.max_hops = static_cast<int>(get_int("max_hops"));
    const long long n_traj = get_int("n_traj");
    if (n_traj < 1) throw ConfigError("n_traj", "must be >= 1");
    rc.n_traj = static_cast<std::size_t>(n_traj);
    rc.scheme = scheme();
    rc.master_seed = has("seed") ? parse_u64("seed", values_.at("seed")) : 0;
    if (has("workers")) {
        const long long w = get_int("workers");
        if (w < 1) throw ConfigError("workers", "must be >= 1");
        rc.n_workers = static_cast<unsigned>(w);
    } else {
        rc.n_workers = default_workers();
    }
    if (has("stride")) {
        const long long s = get_int("stride");
        if (s < 1) throw ConfigError("stride", "must be >= 1");
        rc.stride = static_cast<std::size_t>(s);
    }
    if (has("pairs")) {
        const std::string& p = values_.at("pairs");
        if (p == "uniform") rc.pairs = PairSampling::uniform;
        else if (p == "enumerate") rc.pairs = PairSampling::enumerate;
        else throw ConfigError("pairs", "expected uniform or enumerate");
    }
    if (!(rc.tau > 0.0)) throw ConfigError("tau", "must be > 0");
    if (!(rc.t_max >= rc.tau)) throw ConfigError("t_max", "must be >= tau");
    if (rc.max_hops < 0) throw ConfigError("max_hops", "must be >= 0");
    return rc;
}

OracleConfig Config::oracle_config() const {
    OracleConfig oc;
    const bool has_modes = has("mode_freqs") || has("mode_couplings");
    const ModelParams m = model_params(*this, !has_modes);
    if (auto modes = explicit_modes(*this, m.mass)) {
        oc.modes = std::move(*modes);
    } else {
        if (m.n_modes > 2) throw ConfigError("n_modes", "oracle supports at most 2 bath modes");
        oc.modes = discretize_bath(m);
    }
    if (oc.modes.size() > 2) throw ConfigError("n_modes", "oracle supports at most 2 bath modes");
    oc.omega = m.omega;
    oc.beta = m.beta;
    if (has("n_max")) oc.n_max = static_cast<int>(get_int("n_max"));
    const double tau = get_double("tau");
    const double t_max = get_double("t_max");
    if (!(tau > 0.0)) throw ConfigError("tau", "must be > 0");
    if (!(t_max >= tau)) throw ConfigError("t_max", "must be >= tau");
    const std::size_t stride = has("stride") ? static_cast<std::size_t>(get_int("stride")) : 1;
    if (stride < 1) throw ConfigError("stride", "must be >= 1");
    const auto n_steps = static_cast<std::size_t>(std::llround(t_max / tau));
    for (std::size_t k = 0; k <= n_steps / stride; ++k) {
        oc.t_grid.push_back(static_cast<double>(k * stride) * tau);
    }
    try {
        oc.validate();
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        throw ConfigError(what.substr(0, what.find_first_of(" :")), what);
    }
    return oc;
}

nlohmann::json Config::resolved_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : values_) {
        if (key == "mode_freqs" || key == "mode_couplings") {
            j[key] = parse_list(key, value);
        } else if (contains(kDoubleKeys, key)) {
            j[key] = parse_double(key, value);
        } else if (key == "seed") {
            j[key] = parse_u64(key, value);
        } else if (contains(kIntKeys, key)) {
            j[key] = parse_int(key, value);
        } else {
            j[key] = value;
        }
    }
    auto fill = [&](const char* key, auto v) {
        if (!j.contains(key)) j[key] = v;
    };
    if (!has("mode_freqs")) {
        fill("n_modes", 200);
        fill("omega_max", 3.0);
    }
    fill("mass", 1.0);
    fill("scheme", std::string("none"));
    fill("seed", std::uint64_t{0});
    fill("workers", static_cast<long long>(default_workers()));
    fill("output", output());
    fill("stride", 1);
    fill("pairs", std::string("uniform"));
    return j;
}

}  // namespace sstp
