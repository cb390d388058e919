#pragma once

// AugmentConfig and its flat `key = value` text form. Precedence when loading:
// built-in defaults < config file < explicit overrides.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hsaug/geo.hpp"
#include "hsaug/imaging.hpp"
#include "hsaug/noise.hpp"

namespace hsaug {

struct UnknownConfigKey : Error {
    explicit UnknownConfigKey(const std::string& key) : Error("unknown config key '" + key + "'"), key(key) {}
    std::string key;
};

struct AugmentConfig {
    SpectralParams spectral;
    NoiseParams noise;
    GeoParams geo;
    int pseudo_per_source = 3;
    bool include_originals = true;
    std::uint64_t master_seed = 0;

    void validate() const {
        spectral.validate();
        noise.validate();
        geo.validate();
        if (pseudo_per_source < 1) throw InvalidParameter("pseudo_per_source must be >= 1");
    }

    /// Sets one field from its text form.
    void set(std::string_view key, std::string_view value);

    static const std::vector<std::string>& keys();

    std::map<std::string, std::string> to_map() const;
    std::string to_text() const;

    static AugmentConfig parse(std::string_view text, std::string_view origin = "<config>");
    static AugmentConfig load(const std::string& path);
};

namespace detail {

inline std::string trim_copy(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    const auto t = trim_copy(text);
    T v{};
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc{} || ptr != end || t.empty())
        throw InvalidParameter("config key '" + std::string(key) + "': cannot parse '" + t + "'");
    return v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    const auto t = trim_copy(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw InvalidParameter("config key '" + std::string(key) + "': expected a boolean, got '" + t + "'");
}

inline std::vector<TransformKind> parse_transforms(std::string_view text) {
    std::vector<TransformKind> out;
    const auto t = trim_copy(text);
    if (t.empty() || t == "none") return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto name = trim_copy(item);
        auto k = parse_transform_kind(name);
        if (!k) throw InvalidParameter("config key 'transforms': unknown transform '" + name + "'");
        out.push_back(*k);
    }
    return out;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

struct ConfigField {
    std::function<void(AugmentConfig&, std::string_view)> set;
    std::function<std::string(const AugmentConfig&)> get;
};

inline const std::map<std::string, ConfigField>& config_fields() {
    using C = AugmentConfig;
    // `member` maps a config to one of its int fields
    auto int_field = [](const char* key, auto member) {
        return ConfigField{[key, member](C& c, std::string_view v) { member(c) = parse_number<int>(key, v); },
                           [member](const C& c) { return std::to_string(member(const_cast<C&>(c))); }};
    };
    static const std::map<std::string, ConfigField> fields = [&] {
        std::map<std::string, ConfigField> f;
        f["gamma"] = {[](C& c, std::string_view v) { c.spectral.gamma = parse_number<double>("gamma", v); },
                      [](const C& c) { return format_double(c.spectral.gamma); }};
        f["c1"] = int_field("c1", [](C& c) -> int& { return c.spectral.c1; });
        f["n1"] = int_field("n1", [](C& c) -> int& { return c.noise.n1; });
        f["n2"] = int_field("n2", [](C& c) -> int& { return c.noise.n2; });
        f["sigma1"] = int_field("sigma1", [](C& c) -> int& { return c.noise.sigma1; });
        f["c2"] = int_field("c2", [](C& c) -> int& { return c.noise.c2; });
        f["r1"] = int_field("r1", [](C& c) -> int& { return c.noise.r1; });
        f["r2"] = int_field("r2", [](C& c) -> int& { return c.noise.r2; });
        f["sigma2"] = int_field("sigma2", [](C& c) -> int& { return c.noise.sigma2; });
        f["h1"] = int_field("h1", [](C& c) -> int& { return c.noise.h1; });
        f["h2"] = int_field("h2", [](C& c) -> int& { return c.noise.h2; });
        f["m"] = int_field("m", [](C& c) -> int& { return c.noise.m; });
        f["d"] = int_field("d", [](C& c) -> int& { return c.noise.d; });
        f["horizontal_events"] = int_field("horizontal_events", [](C& c) -> int& { return c.noise.horizontal_events; });
        f["cw"] = int_field("cw", [](C& c) -> int& { return c.geo.cw; });
        f["ch"] = int_field("ch", [](C& c) -> int& { return c.geo.ch; });
        f["target_width"] = int_field("target_width", [](C& c) -> int& { return c.geo.target_width; });
        f["target_height"] = int_field("target_height", [](C& c) -> int& { return c.geo.target_height; });
        f["translate_fraction"] = {
            [](C& c, std::string_view v) { c.geo.translate_fraction = parse_number<double>("translate_fraction", v); },
            [](const C& c) { return format_double(c.geo.translate_fraction); }};
        f["transforms"] = {[](C& c, std::string_view v) { c.geo.transforms = parse_transforms(v); },
                           [](const C& c) {
                               std::string s;
                               for (auto k : c.geo.transforms) {
                                   if (!s.empty()) s += ",";
                                   s += to_string(k);
                               }
                               return s.empty() ? std::string("none") : s;
                           }};
        f["pseudo_per_source"] = int_field("pseudo_per_source", [](C& c) -> int& { return c.pseudo_per_source; });
        f["include_originals"] = {
            [](C& c, std::string_view v) { c.include_originals = parse_bool("include_originals", v); },
            [](const C& c) { return std::string(c.include_originals ? "true" : "false"); }};
        f["master_seed"] = {
            [](C& c, std::string_view v) { c.master_seed = parse_number<std::uint64_t>("master_seed", v); },
            [](const C& c) { return std::to_string(c.master_seed); }};
        return f;
    }();
    return fields;
}

}  // namespace detail

inline void AugmentConfig::set(std::string_view key, std::string_view value) {
    const auto& fields = detail::config_fields();
    auto it = fields.find(detail::trim_copy(key));
    if (it == fields.end()) throw UnknownConfigKey(detail::trim_copy(key));
    it->second.set(*this, value);
}

inline const std::vector<std::string>& AugmentConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : detail::config_fields()) v.push_back(name);
        return v;
    }();
    return k;
}

inline std::map<std::string, std::string> AugmentConfig::to_map() const {
    std::map<std::string, std::string> m;
    for (const auto& [name, field] : detail::config_fields()) m[name] = field.get(*this);
    return m;
}

inline std::string AugmentConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : to_map()) out += k + " = " + v + "\n";
    return out;
}

inline AugmentConfig AugmentConfig::parse(std::string_view text, std::string_view origin) {
    AugmentConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (detail::trim_copy(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter(std::string(origin) + ":" + std::to_string(lineno) + ": expected 'key = value'");
        cfg.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return cfg;
}

inline AugmentConfig AugmentConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

}  // namespace hsaug
