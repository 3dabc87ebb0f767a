#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sparsebench/types.hpp"

namespace sparsebench::csv {

/// Parse failure with 1-based row diagnostics.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, long row) : std::runtime_error(what), row(row) {}
  long row;
};

/// 17 significant digits, enough to round-trip the exact double.
std::string format_double(double v);

/// In-memory table with a header row; all cells kept as strings.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;  // throws CsvError
};

Table read_table(const std::filesystem::path& path);
void write_table(const std::filesystem::path& path, const Table& table);

double parse_double(const std::string& cell, long row);
long parse_long(const std::string& cell, long row);

/// Dataset files carry columns x1..xp and y, in any order.
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace sparsebench::csv
