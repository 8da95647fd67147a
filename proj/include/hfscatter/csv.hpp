#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal numeric CSV: one header line, comma-separated double columns.
// Doubles are printed with %.17g so a written table re-parses bit-identically.

namespace hfs {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv_string(const CsvTable& table) {
  std::ostringstream os;
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("csv: row width does not match header");
    for (std::size_t c = 0; c < row.size(); ++c)
      os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
  return os.str();
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << to_csv_string(table);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t next = line.find(',', pos);
      if (next == std::string::npos) next = line.size();
      const std::string field = line.substr(pos, next - pos);
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("csv: bad numeric field '" + field + "'");
      }
      pos = next + 1;
    }
    if (row.size() != table.columns.size())
      throw std::runtime_error("csv: row width does not match header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_csv(in);
}

}  // namespace hfs
