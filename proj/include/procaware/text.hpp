#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace procaware::text {

/// Shortest decimal text that parses back to the same double ("512", "0.5").
std::string format_number(double value);

/// Strict whole-field parses; nullopt on any trailing garbage.
std::optional<std::int64_t> parse_int(std::string_view field);
std::optional<double> parse_number(std::string_view field);

std::string read_file(std::filesystem::path const& path);
void write_file(std::filesystem::path const& path, std::string_view content);

}  // namespace procaware::text
