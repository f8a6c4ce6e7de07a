#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phasex {

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Reads a whole file; throws phasex::Error on I/O failure.
std::string read_text_file(const std::filesystem::path& path);

/// Writes atomically (temp file + rename) so readers never observe a torn file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Formats a double with enough digits to round-trip exactly (%.17g).
std::string fmt_double(double v);

/// Parses a decimal or scientific-notation floating point token.
/// Returns nullopt if the token is not entirely a number.
std::optional<double> parse_double(std::string_view token);

} // namespace phasex
