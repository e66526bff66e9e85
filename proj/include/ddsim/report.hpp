#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ddsim {

// 17 significant digits, enough for doubles to round-trip.
std::string format_double(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Column index by name; throws std::out_of_range when absent.
  std::size_t column(const std::string& name) const;
};

// Comma-separated, header line first, '\n' line ends. Throws
// std::runtime_error when the file cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Strict parse: every row must have the header's width and every cell must be
// a number. Throws std::runtime_error with the line number otherwise.
CsvTable read_csv(const std::filesystem::path& path);

// Ordered key = value lines.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

void write_key_values(const std::filesystem::path& path, const KeyValues& kv);
KeyValues read_key_values(const std::filesystem::path& path);

// Writes a whole text file; throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ddsim
