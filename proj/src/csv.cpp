#include "sparsebench/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sparsebench::csv {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int Table::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

int Table::require_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw CsvError("missing column '" + name + "'", 1);
  return c;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

}  // namespace

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path.string() + "'", 0);
  Table t;
  std::string line;
  long row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() && in.eof()) break;
    auto cells = split_line(line);
    if (row == 1) {
      t.header = std::move(cells);
    } else {
      if (cells.size() != t.header.size()) {
        std::ostringstream msg;
        msg << path.string() << ": row " << row << " has " << cells.size()
            << " cells, expected " << t.header.size();
        throw CsvError(msg.str(), row);
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (t.header.empty()) throw CsvError(path.string() + ": empty file", 0);
  return t;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw CsvError("cannot write '" + path.string() + "'", 0);
  for (size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

double parse_double(const std::string& cell, long row) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    std::ostringstream msg;
    msg << "row " << row << ": '" << cell << "' is not a number";
    throw CsvError(msg.str(), row);
  }
  return v;
}

long parse_long(const std::string& cell, long row) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    std::ostringstream msg;
    msg << "row " << row << ": '" << cell << "' is not an integer";
    throw CsvError(msg.str(), row);
  }
  return v;
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  Table t;
  const Eigen::Index p = data.p();
  for (Eigen::Index j = 0; j < p; ++j)
    t.header.push_back("x" + std::to_string(j + 1));
  t.header.push_back("y");
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(p + 1);
    for (Eigen::Index j = 0; j < p; ++j)
      row.push_back(format_double(data.X(i, j)));
    row.push_back(format_double(data.Y[i]));
    t.rows.push_back(std::move(row));
  }
  write_table(path, t);
}

Dataset read_dataset(const std::filesystem::path& path) {
  Table t = read_table(path);
  const int ycol = t.require_column("y");
  std::vector<int> xcols;
  for (int j = 1;; ++j) {
    const int c = t.column("x" + std::to_string(j));
    if (c < 0) break;
    xcols.push_back(c);
  }
  if (xcols.empty())
    throw CsvError(path.string() + ": no x1..xp columns found", 1);
  if (t.rows.empty()) throw CsvError(path.string() + ": no data rows", 1);

  Dataset d;
  d.X.resize(t.rows.size(), xcols.size());
  d.Y.resize(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const long row = static_cast<long>(i) + 2;  // header is row 1
    for (size_t j = 0; j < xcols.size(); ++j)
      d.X(i, j) = parse_double(t.rows[i][xcols[j]], row);
    d.Y[i] = parse_double(t.rows[i][ycol], row);
  }
  d.validate();
  return d;
}

}  // namespace sparsebench::csv
