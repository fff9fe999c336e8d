#pragma once

#include "structcov/data.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace structcov {

/// Numeric CSV. A first row that does not parse as numbers is taken as a header. Empty
/// cells and NA/NaN mark missing entries.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
  Mask present;
};

[[nodiscard]] CsvTable read_numeric_csv(const std::string& path);

/// Raw cells, for files whose columns are not all numeric.
[[nodiscard]] std::vector<std::vector<std::string>> read_csv_cells(const std::string& path);

/// 17 significant digits, enough for every double to parse back unchanged.
[[nodiscard]] std::string format_double(double v);

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& header = {});
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& header = {});

/// `id,label` rows (header optional) mapped onto the variable order in `ids`. Labels may be
/// any strings; they are numbered by first appearance. Every id must appear exactly once.
[[nodiscard]] std::vector<int> read_labels_csv(const std::string& path, const std::vector<std::string>& ids);

/// Adjacency as a dense d x d 0/1 matrix or as an edge list of id pairs; the layout is
/// detected from the shape of the file.
[[nodiscard]] Eigen::MatrixXd read_adjacency_csv(const std::string& path, const std::vector<std::string>& ids);

}  // namespace structcov
