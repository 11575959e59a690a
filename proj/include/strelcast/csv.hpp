#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the CSV readers and writers.
namespace strelcast::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

/// Whole-field parses; throw DataError naming `what` on failure.
double to_double(std::string_view field, std::string_view what);
std::int64_t to_int(std::string_view field, std::string_view what);

/// Shortest representation that parses back to the same double.
std::string format(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Non-empty lines with trailing '\r' removed.
std::vector<std::string_view> lines(std::string_view text);

}  // namespace strelcast::csv
