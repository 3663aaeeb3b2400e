// config.hpp: run configuration for the command-line tool.
//
// A config file is a list of `key = value` lines, optionally grouped under
// `[section]` headers (so `[emitter]` then `rabi_over_gamma = 2` is the same
// as `emitter.rabi_over_gamma = 2`). `#` starts a comment. CSV files written
// by the tool can be fed back in: only their `# config:` lines are read.
// JSON outputs are read from their "config" object.

#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "frf/error.hpp"
#include "frf/instrument.hpp"
#include "frf/units.hpp"

namespace frf::cli {

/// Invalid configuration: reported with the origin of the offending value.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigEntry {
    std::string value;
    std::string origin; // "file:line" or "--flag"
};

using ConfigEntries = std::map<std::string, ConfigEntry>;

struct KeySpec {
    std::string_view key;
    std::string_view flag;
    std::string_view help;
};

inline constexpr KeySpec config_keys[] = {
    {"emitter.gamma_ueV", "--gamma", "emitter linewidth gamma in ueV (sets the unit of all *_over_gamma values)"},
    {"emitter.rabi_over_gamma", "--rabi", "Rabi frequency in units of gamma"},
    {"emitter.detuning_over_gamma", "--detuning", "emitter minus laser frequency in units of gamma"},
    {"emitter.laser_linewidth_neV", "--laser-linewidth", "laser FWHM in neV"},
    {"filter.width_over_gamma", "--width", "filter FWHM in units of gamma"},
    {"filter.preset", "--preset", "named filter from the preset table, instead of --width"},
    {"filter.center_over_gamma", "--center", "filter center relative to the laser, in units of gamma"},
    {"background.beta_lo", "--beta-lo", "lower background fraction of the detected signal, in [0, 0.2]"},
    {"background.beta_hi", "--beta-hi", "upper background fraction of the detected signal, in [0, 0.2]"},
    {"irf.enabled", "--irf", "convolve g2 with the detector IRF (true/false)"},
    {"irf.fwhm_ps", "--irf-fwhm", "detector IRF FWHM in ps"},
    {"grid.tau_max", "--tau-max", "largest delay in units of 1/gamma (default max(20, 20 gamma/Gamma))"},
    {"grid.n_tau", "--n-tau", "number of delay points"},
    {"grid.omega_max", "--omega-max", "spectrum half-span in units of gamma (default 2 Omega + 10)"},
    {"grid.n_omega", "--n-omega", "number of frequency points"},
    {"sweep.axis", "--axis", "sweep axis: filter-width or rabi"},
    {"sweep.values", "--values", "sweep values in units of gamma: a,b,c or log(start,stop,n) or lin(start,stop,n)"},
    {"spectrum.irf_fwhm_ueV", "--spectral-irf", "spectrometer response FWHM in ueV (0 disables)"},
    {"numerics.eta", "--eta", "starting sensor coupling in units of gamma (default 1e-3 min(gamma, Gamma))"},
    {"output.format", "--format", "csv or json"},
};

inline bool is_known_key(std::string_view key) {
    return std::any_of(std::begin(config_keys), std::end(config_keys), [&](const KeySpec& k) { return k.key == key; });
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace detail

/// Parse `key = value` text. `name` labels error messages.
inline ConfigEntries parse_config_text(std::string_view text, const std::string& name) {
    std::vector<std::string> lines;
    {
        std::istringstream in{std::string(text)};
        for (std::string line; std::getline(in, line);) lines.push_back(line);
    }
    constexpr std::string_view marker = "# config:";
    const bool from_output =
        std::any_of(lines.begin(), lines.end(), [&](const std::string& l) { return l.rfind(marker, 0) == 0; });

    ConfigEntries out;
    std::string section;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string where = name + ":" + std::to_string(n + 1);
        std::string line = lines[n];
        if (from_output) {
            if (line.rfind(marker, 0) != 0) continue;
            line = line.substr(marker.size());
        } else if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header '" + line + "'");
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section header");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key before '='");
        if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
        if (key == "output.path") continue; // never replayed from a file
        if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "' (first set at " + out[key].origin + ")");
        out[key] = {value, where};
    }
    return out;
}

/// Read a config from a JSON document: either its "config" object or the
/// top-level object itself.
inline ConfigEntries parse_config_json(std::string_view text, const std::string& name) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ConfigError(name + ": invalid JSON: " + ex.what());
    }
    const nlohmann::json& obj = doc.contains("config") ? doc["config"] : doc;
    if (!obj.is_object()) throw ConfigError(name + ": \"config\" must be an object");
    ConfigEntries out;
    for (const auto& [key, v] : obj.items()) {
        if (key == "output.path") continue;
        if (!is_known_key(key)) throw ConfigError(name + ": unknown key '" + key + "'");
        std::string value;
        if (v.is_string())
            value = v.get<std::string>();
        else if (v.is_boolean() || v.is_number())
            value = v.dump();
        else
            throw ConfigError(name + ": value of '" + key + "' must be a string, number or boolean");
        out[key] = {value, name + ":" + key};
    }
    return out;
}

inline ConfigEntries load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_config_json(text, path);
    return parse_config_text(text, path);
}

enum class SweepAxis { filter_width, rabi };
enum class OutputFormat { csv, json };

struct RunConfig {
    double gamma_ueV = 20.0;
    double rabi_over_gamma = 0.5;
    double detuning_over_gamma = 0.0;
    double laser_linewidth_neV = 10.0;
    double width_over_gamma = 1.0;
    std::string preset; // empty: use width_over_gamma
    double center_over_gamma = 0.0;
    double beta_lo = 0.0;
    double beta_hi = 0.0;
    bool irf_enabled = false;
    double irf_fwhm_ps = 37.5;
    std::optional<double> tau_max;
    std::size_t n_tau = 2001;
    std::optional<double> omega_max;
    std::size_t n_omega = 4001;
    SweepAxis axis = SweepAxis::filter_width;
    std::vector<double> values; // empty: command default
    double spectral_irf_ueV = 0.0;
    std::optional<double> eta;
    OutputFormat format = OutputFormat::csv;

    /// Filter width in units of gamma, after resolving a preset.
    double filter_width() const {
        if (!preset.empty()) return units::from_ueV(find_preset(preset).fwhm_ueV, gamma_ueV);
        return width_over_gamma;
    }
    double laser_linewidth_over_gamma() const {
        return units::from_ueV(laser_linewidth_neV / units::neV_per_ueV, gamma_ueV);
    }
    double irf_fwhm_over_gamma() const { return units::from_ps(irf_fwhm_ps, gamma_ueV); }
};

namespace detail {

inline double parse_double(const ConfigEntry& e, const std::string& key) {
    const std::string s = trim(e.value);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(e.origin + ": " + key + ": expected a finite number, got '" + e.value + "'");
    return v;
}

inline std::size_t parse_count(const ConfigEntry& e, const std::string& key, std::size_t min) {
    const std::string s = trim(e.value);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || v < static_cast<long long>(min))
        throw ConfigError(e.origin + ": " + key + ": expected an integer >= " + std::to_string(min) + ", got '" +
                          e.value + "'");
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const ConfigEntry& e, const std::string& key) {
    const std::string s = lower(trim(e.value));
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError(e.origin + ": " + key + ": expected true or false, got '" + e.value + "'");
}

/// "a,b,c", "log(start,stop,n)" or "lin(start,stop,n)".
inline std::vector<double> parse_values(const ConfigEntry& e, const std::string& key) {
    const std::string s = lower(trim(e.value));
    auto split = [&](const std::string& body) {
        std::vector<double> out;
        std::stringstream in(body);
        for (std::string item; std::getline(in, item, ',');) out.push_back(parse_double({item, e.origin}, key));
        return out;
    };
    for (const std::string_view fn : {"log", "lin"}) {
        if (s.rfind(std::string(fn) + "(", 0) != 0) continue;
        if (s.back() != ')') throw ConfigError(e.origin + ": " + key + ": missing ')' in '" + e.value + "'");
        const std::vector<double> args = split(s.substr(fn.size() + 1, s.size() - fn.size() - 2));
        if (args.size() != 3 || args[2] < 1 || args[2] != std::floor(args[2]))
            throw ConfigError(e.origin + ": " + key + ": " + std::string(fn) + "(start, stop, n) needs an integer n >= 1");
        const auto n = static_cast<std::size_t>(args[2]);
        if (fn == "log" && !(args[0] > 0.0 && args[1] > 0.0))
            throw ConfigError(e.origin + ": " + key + ": log() bounds must be positive");
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
            out[k] = fn == "log" ? args[0] * std::pow(args[1] / args[0], f) : args[0] + (args[1] - args[0]) * f;
        }
        if (n > 1) out.back() = args[1];
        return out;
    }
    if (s.empty()) throw ConfigError(e.origin + ": " + key + ": sweep values must be non-empty");
    return split(s);
}

} // namespace detail

/// Validate entries and build a RunConfig. Errors name the origin of the value.
inline RunConfig resolve_config(const ConfigEntries& entries) {
    using namespace detail;
    RunConfig c;
    auto get = [&](const char* key) -> const ConfigEntry* {
        const auto it = entries.find(key);
        return it == entries.end() ? nullptr : &it->second;
    };
    auto fail = [](const ConfigEntry& e, const std::string& key, const std::string& msg) {
        throw ConfigError(e.origin + ": " + key + ": " + msg + " (got '" + e.value + "')");
    };
    auto positive = [&](const char* key, double& dst) {
        if (const auto* e = get(key)) {
            dst = parse_double(*e, key);
            if (!(dst > 0.0)) fail(*e, key, "must be positive");
        }
    };
    auto nonneg = [&](const char* key, double& dst) {
        if (const auto* e = get(key)) {
            dst = parse_double(*e, key);
            if (dst < 0.0) fail(*e, key, "must be non-negative");
        }
    };
    auto real = [&](const char* key, double& dst) {
        if (const auto* e = get(key)) dst = parse_double(*e, key);
    };
    auto beta = [&](const char* key, double& dst) {
        if (const auto* e = get(key)) {
            dst = parse_double(*e, key);
            if (dst < 0.0 || dst > 0.2) fail(*e, key, "must lie in [0, 0.2]");
        }
    };

    positive("emitter.gamma_ueV", c.gamma_ueV);
    nonneg("emitter.rabi_over_gamma", c.rabi_over_gamma);
    real("emitter.detuning_over_gamma", c.detuning_over_gamma);
    nonneg("emitter.laser_linewidth_neV", c.laser_linewidth_neV);
    positive("filter.width_over_gamma", c.width_over_gamma);
    if (const auto* e = get("filter.preset")) {
        c.preset = trim(e->value);
        if (!c.preset.empty()) {
            try {
                c.preset = std::string(find_preset(c.preset).name);
            } catch (const InvalidArgument& ex) {
                throw ConfigError(e->origin + ": filter.preset: " + ex.what());
            }
        }
    }
    real("filter.center_over_gamma", c.center_over_gamma);
    beta("background.beta_lo", c.beta_lo);
    beta("background.beta_hi", c.beta_hi);
    if (c.beta_lo > c.beta_hi) {
        const auto* e = get("background.beta_lo");
        throw ConfigError((e ? e->origin : std::string("config")) + ": background.beta_lo must not exceed beta_hi");
    }
    if (const auto* e = get("irf.enabled")) c.irf_enabled = parse_bool(*e, "irf.enabled");
    positive("irf.fwhm_ps", c.irf_fwhm_ps);
    if (get("grid.tau_max")) {
        double v = 0.0;
        positive("grid.tau_max", v);
        c.tau_max = v;
    }
    if (const auto* e = get("grid.n_tau")) c.n_tau = parse_count(*e, "grid.n_tau", 2);
    if (get("grid.omega_max")) {
        double v = 0.0;
        positive("grid.omega_max", v);
        c.omega_max = v;
    }
    if (const auto* e = get("grid.n_omega")) c.n_omega = parse_count(*e, "grid.n_omega", 2);
    if (const auto* e = get("sweep.axis")) {
        const std::string a = lower(trim(e->value));
        if (a == "filter-width" || a == "filter_width" || a == "width")
            c.axis = SweepAxis::filter_width;
        else if (a == "rabi")
            c.axis = SweepAxis::rabi;
        else
            fail(*e, "sweep.axis", "must be filter-width or rabi");
    }
    if (const auto* e = get("sweep.values")) {
        c.values = parse_values(*e, "sweep.values");
        for (double v : c.values)
            if (!(v > 0.0)) fail(*e, "sweep.values", "all sweep values must be positive");
    }
    nonneg("spectrum.irf_fwhm_ueV", c.spectral_irf_ueV);
    if (get("numerics.eta")) {
        double v = 0.0;
        positive("numerics.eta", v);
        c.eta = v;
    }
    if (const auto* e = get("output.format")) {
        const std::string f = lower(trim(e->value));
        if (f == "csv")
            c.format = OutputFormat::csv;
        else if (f == "json")
            c.format = OutputFormat::json;
        else
            fail(*e, "output.format", "must be csv or json");
    }
    return c;
}

namespace detail {

/// Shortest decimal form that reads back to exactly v.
inline std::string num(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace detail

/// Resolved configuration as key/value strings, exact enough to replay.
inline std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& c,
                                                                     const std::vector<double>& sweep_values,
                                                                     std::optional<double> tau_max,
                                                                     std::optional<double> omega_max) {
    using detail::num;
    std::vector<std::pair<std::string, std::string>> out{
        {"emitter.gamma_ueV", num(c.gamma_ueV)},
        {"emitter.rabi_over_gamma", num(c.rabi_over_gamma)},
        {"emitter.detuning_over_gamma", num(c.detuning_over_gamma)},
        {"emitter.laser_linewidth_neV", num(c.laser_linewidth_neV)},
    };
    if (c.preset.empty())
        out.emplace_back("filter.width_over_gamma", num(c.width_over_gamma));
    else
        out.emplace_back("filter.preset", c.preset);
    out.emplace_back("filter.center_over_gamma", num(c.center_over_gamma));
    out.emplace_back("background.beta_lo", num(c.beta_lo));
    out.emplace_back("background.beta_hi", num(c.beta_hi));
    out.emplace_back("irf.enabled", c.irf_enabled ? "true" : "false");
    out.emplace_back("irf.fwhm_ps", num(c.irf_fwhm_ps));
    if (tau_max) out.emplace_back("grid.tau_max", num(*tau_max));
    out.emplace_back("grid.n_tau", std::to_string(c.n_tau));
    if (omega_max) out.emplace_back("grid.omega_max", num(*omega_max));
    out.emplace_back("grid.n_omega", std::to_string(c.n_omega));
    out.emplace_back("sweep.axis", c.axis == SweepAxis::rabi ? "rabi" : "filter-width");
    if (!sweep_values.empty()) {
        std::string v;
        for (std::size_t k = 0; k < sweep_values.size(); ++k) v += (k ? "," : "") + num(sweep_values[k]);
        out.emplace_back("sweep.values", v);
    }
    out.emplace_back("spectrum.irf_fwhm_ueV", num(c.spectral_irf_ueV));
    if (c.eta) out.emplace_back("numerics.eta", num(*c.eta));
    out.emplace_back("output.format", c.format == OutputFormat::json ? "json" : "csv");
    return out;
}

} // namespace frf::cli
