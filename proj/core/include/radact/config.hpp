#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace radact::config {

/// INI-style config: [section] headers, key = value lines, '#' comments.
/// Keys may repeat within a section (segment lists rely on it); section and
/// key order is preserved.
struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    std::string get(const std::string& key) const; // throws ConfigError
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_all(const std::string& key) const;
};

struct ParsedConfig {
    std::vector<Section> sections;

    const Section* find(const std::string& name) const;
    // Sections whose names start with "prefix." in file order.
    std::vector<const Section*> find_prefixed(const std::string& prefix) const;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config_file(const std::string& path);

std::vector<std::string> split_ws(const std::string& s);

} // namespace radact::config
