#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace regrest {

// Hex-encoded SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::vector<std::string> split_lines(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

// Replaces every occurrence of `from` (must be non-empty) with `to`.
std::string replace_all(std::string s, std::string_view from, std::string_view to);

std::string to_lower(std::string s);
std::string trim(std::string_view s);

} // namespace regrest
