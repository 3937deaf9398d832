#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scruf {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Strict full-string parse; throws scruf::Error naming `what` on failure.
double parse_double(std::string_view text, const std::string& what);

std::vector<std::string> split(std::string_view line, char sep);

// One parsed row of a tab-separated file, with its 1-based line number.
struct TsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Reads a UTF-8 tab-separated file, skipping blank lines and '#' comments.
// Every row must have exactly `columns` fields.
std::vector<TsvRow> read_tsv(const std::filesystem::path& path, std::size_t columns);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace scruf
