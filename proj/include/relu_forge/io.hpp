#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relu_forge/approximator.hpp"
#include "relu_forge/domain_ext.hpp"
#include "relu_forge/errors.hpp"
#include "relu_forge/manifold.hpp"

namespace relu_forge {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes via a sibling temp file plus rename, so readers never observe a
// partially written file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw parse_error("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw parse_error("write to '" + tmp + "' failed");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw parse_error("cannot move '" + tmp + "' onto '" + path + "'");
  }
}

namespace detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable parse_csv(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size())
        throw parse_error(origin + ":" + std::to_string(lineno) + ": expected " +
                          std::to_string(table.header.size()) + " columns, got " +
                          std::to_string(cells.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw parse_error(origin + ": empty CSV");
  return table;
}

// Header must start with x1..xd; returns d and whether `extra` follows.
inline std::size_t csv_point_columns(const CsvTable& t, const std::string& origin,
                                     const std::string& extra, bool* has_extra) {
  std::size_t d = 0;
  while (d < t.header.size() && t.header[d] == "x" + std::to_string(d + 1)) ++d;
  if (d == 0) throw parse_error(origin + ": header must start with x1, x2, ...");
  *has_extra = false;
  if (d < t.header.size()) {
    if (t.header[d] == extra && d + 1 == t.header.size())
      *has_extra = true;
    else
      throw parse_error(origin + ": unexpected column '" + t.header[d] + "'");
  }
  return d;
}

}  // namespace detail

// CSV with header x1,..,xd,value; one sampled point per row. The box radius
// is the given R, or the smallest box containing the points when R <= 0.
inline SampledDomain read_domain_csv(const std::string& path, double R = 0.0) {
  const detail::CsvTable t = detail::parse_csv(read_file(path), path);
  bool has_value = false;
  const std::size_t d = detail::csv_point_columns(t, path, "value", &has_value);
  if (!has_value) throw parse_error(path + ": missing 'value' column");
  std::vector<std::vector<double>> points;
  std::vector<double> values;
  double radius = 0.0;
  for (const auto& row : t.rows) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = detail::parse_real(row[i]);
      radius = std::max(radius, std::abs(x[i]));
    }
    points.push_back(std::move(x));
    values.push_back(detail::parse_real(row[d]));
  }
  if (R <= 0.0) R = radius > 0.0 ? radius : 1.0;
  return SampledDomain::make(std::move(points), std::move(values), R);
}

// CSV with header x1,..,xd[,tag]; tag 1 marks base points of the cloud.
inline PointCloud read_cloud_csv(const std::string& path) {
  const detail::CsvTable t = detail::parse_csv(read_file(path), path);
  bool has_tag = false;
  const std::size_t d = detail::csv_point_columns(t, path, "tag", &has_tag);
  std::vector<std::vector<double>> points;
  std::vector<char> tags;
  for (const auto& row : t.rows) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = detail::parse_real(row[i]);
    points.push_back(std::move(x));
    if (has_tag) tags.push_back(row[d] == "1" ? 1 : 0);
  }
  return PointCloud::make(std::move(points), std::move(tags));
}

}  // namespace relu_forge
