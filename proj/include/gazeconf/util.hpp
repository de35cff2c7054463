#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace gazeconf {

/// Shortest round-trip decimal representation of a double (std::to_chars).
/// Identical input bits always produce identical text, which keeps the CSV
/// and report outputs byte-reproducible.
std::string format_double(double v);

std::string_view trim(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

std::string to_lower(std::string_view s);

/// Reads a whole file; throws IoError if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes text, creating/truncating the file; throws IoError on failure.
void write_text_file(const std::string& path, std::string_view content);

} // namespace gazeconf
