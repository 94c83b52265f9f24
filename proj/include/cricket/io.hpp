#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cricket {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary and renames it over `path`, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// `%a` encoding of a double; exact round trip through `parse_hex_double`.
std::string hex_double(double value);
double parse_hex_double(const std::string& text);

}  // namespace cricket
