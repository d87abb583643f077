#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cogbench::csv {

// Fixed 12-significant-digit rendering ("%.12g"); negative zero prints as 0.
std::string format_number(double value);

std::string join(const std::vector<std::string>& fields);

// Splits on commas and trims surrounding blanks. Fields never contain commas
// in the files this project writes.
std::vector<std::string> split(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Throws InputError on an unreadable file, a missing header or ragged rows.
Table read(const std::filesystem::path& path);

// Writes header + rows with '\n' line endings; creates parent directories.
void write(const std::filesystem::path& path, const Table& table);

// Strict numeric parse; throws InputError naming `what` on failure.
double parse_number(std::string_view text, std::string_view what);

}  // namespace cogbench::csv
