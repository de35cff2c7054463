#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace gazeconf {

/**
 * Minimal INI reader: `key = value` lines, optional `[section]` headers,
 * `#`/`;` comments. Keys before any section header live in the "" section.
 * Detector parameters and generator profiles use this format.
 */
class IniFile {
public:
    static IniFile parse(std::string_view text, const std::string& origin = "<string>");
    static IniFile parse_file(const std::string& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;

    bool has_section(const std::string& section) const;

private:
    // section -> key -> value
    std::map<std::string, std::map<std::string, std::string>> values_;
    std::string origin_;
};

} // namespace gazeconf
