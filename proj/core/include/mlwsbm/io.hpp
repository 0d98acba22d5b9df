#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mlwsbm {

enum class AdjacencyFormat { DenseCsv, EdgeListTsv };

/// Load a symmetric matrix. Dense input must be symmetric within 1e-9
/// (the error names the first offending pair); edge lists are 0-based
/// (i, j, weight) rows, mirrored, duplicate unordered pairs rejected.
/// A nonzero diagonal is forced to 0 with a warning.
Eigen::MatrixXd load_adjacency(const std::string& path, AdjacencyFormat format,
                               std::optional<int> n = std::nullopt,
                               std::ostream* warnings = nullptr);

void write_dense_csv(const std::string& path, const Eigen::MatrixXd& matrix);

/// Label files: one 1-based integer per line.
std::vector<int> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<int>& labels);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mlwsbm
