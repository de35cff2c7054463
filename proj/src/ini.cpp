#include "gazeconf/ini.hpp"

#include <charconv>

#include "gazeconf/errors.hpp"
#include "gazeconf/util.hpp"

namespace gazeconf {

IniFile IniFile::parse(std::string_view text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(line);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;

        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3) {
                throw ParseError(origin + ":" + std::to_string(line_no) + ": malformed section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) {
            throw ParseError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        ini.values_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::parse_file(const std::string& path) {
    return parse(read_text_file(path), path);
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    auto sec = values_.find(section);
    if (sec == values_.end()) return std::nullopt;
    auto it = sec->second.find(key);
    if (it == sec->second.end()) return std::nullopt;
    return it->second;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    double out = 0.0;
    const char* begin = v->data();
    const char* end = begin + v->size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(origin_ + ": key '" + key + "' is not a number: '" + *v + "'");
    }
    return out;
}

std::int64_t IniFile::get_int(const std::string& section, const std::string& key,
                              std::int64_t fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    std::int64_t out = 0;
    const char* begin = v->data();
    const char* end = begin + v->size();
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError(origin_ + ": key '" + key + "' is not an integer: '" + *v + "'");
    }
    return out;
}

bool IniFile::has_section(const std::string& section) const {
    return values_.count(section) > 0;
}

} // namespace gazeconf
