#include "structcov/io.hpp"

#include "structcov/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace structcov {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\"");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\"");
  return s.substr(a, b - a + 1);
}

bool is_missing(const std::string& cell) {
  std::string c = cell;
  std::transform(c.begin(), c.end(), c.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return c.empty() || c == "na" || c == "nan" || c == "null";
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  // Underflow still yields the nearest subnormal, which is the value that was written.
  const bool range_ok = errno == 0 || (errno == ERANGE && std::abs(out) <= std::numeric_limits<double>::min());
  return range_ok && end == cell.c_str() + cell.size() && std::isfinite(out);
}

}  // namespace

std::vector<std::vector<std::string>> read_csv_cells(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

CsvTable read_numeric_csv(const std::string& path) {
  auto rows = read_csv_cells(path);
  CsvTable t;
  if (rows.empty()) throw InputError("'" + path + "' is empty");
  std::size_t first = 0;
  for (const auto& c : rows[0]) {
    double v;
    if (!is_missing(c) && !parse_double(c, v)) {
      t.header = rows[0];
      first = 1;
      break;
    }
  }
  const std::size_t width = rows[0].size();
  const auto n = static_cast<Eigen::Index>(rows.size() - first);
  t.values = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(width));
  t.present = Mask::Constant(n, static_cast<Eigen::Index>(width), true);
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (rows[r].size() != width)
      throw InputError("'" + path + "' row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " cells, expected " + std::to_string(width));
    const auto i = static_cast<Eigen::Index>(r - first);
    for (std::size_t c = 0; c < width; ++c) {
      const auto j = static_cast<Eigen::Index>(c);
      if (is_missing(rows[r][c])) {
        t.present(i, j) = false;
        continue;
      }
      double v;
      if (!parse_double(rows[r][c], v))
        throw InputError("'" + path + "' row " + std::to_string(r + 1) + ": '" + rows[r][c] +
                         "' is not a number");
      t.values(i, j) = v;
    }
  }
  return t;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M, const std::vector<std::string>& header) {
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != M.cols())
      throw DimensionError("header length differs from the column count");
    for (std::size_t j = 0; j < header.size(); ++j) os << (j ? "," : "") << header[j];
    os << '\n';
  }
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_double(M(i, j));
    os << '\n';
  }
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  write_matrix_csv(out, M, header);
}

std::vector<int> read_labels_csv(const std::string& path, const std::vector<std::string>& ids) {
  auto rows = read_csv_cells(path);
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = i;
  std::vector<int> labels(ids.size(), -1);
  std::map<std::string, int> codes;
  std::size_t start = 0;
  if (!rows.empty() && rows[0].size() == 2 && !pos.count(rows[0][0])) start = 1;  // header
  for (std::size_t r = start; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw InputError("'" + path + "' row " + std::to_string(r + 1) + " must be id,label");
    auto it = pos.find(rows[r][0]);
    if (it == pos.end()) throw InputError("'" + path + "': unknown id '" + rows[r][0] + "'");
    if (labels[it->second] != -1) throw InputError("'" + path + "': id '" + rows[r][0] + "' repeated");
    auto code = codes.emplace(rows[r][1], static_cast<int>(codes.size())).first->second;
    labels[it->second] = code;
  }
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (labels[i] == -1) throw InputError("'" + path + "': no label for id '" + ids[i] + "'");
  return labels;
}

Eigen::MatrixXd read_adjacency_csv(const std::string& path, const std::vector<std::string>& ids) {
  auto rows = read_csv_cells(path);
  const auto d = static_cast<Eigen::Index>(ids.size());
  std::map<std::string, Eigen::Index> pos;
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);

  // Dense when, after an optional header row and id column, a d x d block remains.
  auto dense_block = [&](std::size_t skip_rows, std::size_t skip_cols) {
    if (rows.size() != static_cast<std::size_t>(d) + skip_rows) return false;
    for (std::size_t r = skip_rows; r < rows.size(); ++r)
      if (rows[r].size() != static_cast<std::size_t>(d) + skip_cols) return false;
    for (std::size_t r = skip_rows; r < rows.size(); ++r)
      for (std::size_t c = skip_cols; c < rows[r].size(); ++c) {
        double v;
        if (!parse_double(rows[r][c], v)) return false;
        M(static_cast<Eigen::Index>(r - skip_rows), static_cast<Eigen::Index>(c - skip_cols)) = v;
      }
    return true;
  };
  if (d != 2 || rows.size() != 1) {
    for (auto [sr, sc] : {std::pair<std::size_t, std::size_t>{0, 0}, {1, 0}, {1, 1}, {0, 1}})
      if (dense_block(sr, sc)) return M;
  }
  M.setZero();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw InputError("'" + path + "' is neither a d x d matrix nor an edge list");
    auto a = pos.find(rows[r][0]), b = pos.find(rows[r][1]);
    if (a == pos.end() || b == pos.end()) {
      if (r == 0 && a == pos.end() && b == pos.end()) continue;  // header
      throw InputError("'" + path + "' row " + std::to_string(r + 1) + " references an unknown id");
    }
    if (a->second == b->second) throw InputError("'" + path + "': self loop at '" + rows[r][0] + "'");
    M(a->second, b->second) = M(b->second, a->second) = 1.0;
  }
  return M;
}

}  // namespace structcov
