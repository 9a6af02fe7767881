#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tspec::textio {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Strict numeric parse of a whole field (surrounding blanks allowed).
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

// Splits one CSV line on commas. Double-quoted fields may contain commas;
// "" inside quotes is a literal quote.
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_file(const std::filesystem::path& path);

// Truncates and writes the whole file.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace tspec::textio
