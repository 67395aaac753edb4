#include "radact/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "radact/errors.hpp"
#include "radact/io.hpp"

namespace radact::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace

bool Section::has(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return true;
    return false;
}

std::string Section::get(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw ConfigError("config: [" + name + "] is missing key '" + key + "'");
}

std::string Section::get_or(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    return fallback;
}

double Section::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("config: [" + name + "] " + key + " = '" + v + "' is not a number");
}

std::int64_t Section::get_int(const std::string& key, std::int64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("config: [" + name + "] " + key + " = '" + v + "' is not an integer");
}

std::uint64_t Section::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("config: [" + name + "] " + key + " = '" + v +
                      "' is not an unsigned integer");
}

bool Section::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: [" + name + "] " + key + " = '" + v + "' is not a boolean");
}

std::vector<std::string> Section::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key) out.push_back(v);
    return out;
}

const Section* ParsedConfig::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<const Section*> ParsedConfig::find_prefixed(const std::string& prefix) const {
    std::vector<const Section*> out;
    const std::string p = prefix + ".";
    for (const auto& s : sections)
        if (s.name.rfind(p, 0) == 0) out.push_back(&s);
    return out;
}

ParsedConfig parse_config_text(const std::string& text) {
    ParsedConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    Section* current = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": unterminated section header");
            cfg.sections.push_back({trim(t.substr(1, t.size() - 2)), {}});
            current = &cfg.sections.back();
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        if (!current)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": key outside any [section]");
        current->entries.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

ParsedConfig parse_config_file(const std::string& path) {
    return parse_config_text(io::read_text_file(path));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace radact::config
