#include "mlwsbm/preprocess.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace mlwsbm {

Eigen::MatrixXd preprocess_correlation(const Eigen::MatrixXd& matrix, Threshold threshold) {
  const int n = static_cast<int>(matrix.rows());
  if (matrix.cols() != n) throw std::domain_error("preprocess: matrix must be square");

  double t = threshold.value;
  if (threshold.kind == Threshold::Kind::Mean) {
    // Off-diagonal mean, accumulated relative to a reference entry so a
    // constant matrix yields exactly that constant.
    const double ref = n > 1 ? matrix(0, 1) : 0.0;
    double sum = 0.0;
    long count = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) {
          sum += matrix(i, j) - ref;
          ++count;
        }
    t = count > 0 ? ref + sum / count : 0.0;
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && matrix(i, j) > t) out(i, j) = 1.0;
  return out;
}

Eigen::MatrixXd preprocess_counts(const std::vector<Eigen::MatrixXd>& matrices,
                                  std::ostream* warnings) {
  if (matrices.empty()) throw std::domain_error("preprocess: need at least one matrix");
  const Eigen::Index rows = matrices[0].rows(), cols = matrices[0].cols();
  for (const Eigen::MatrixXd& m : matrices)
    if (m.rows() != rows || m.cols() != cols)
      throw std::domain_error("preprocess: count matrices have mismatched shapes");

  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(rows, cols);
  for (const Eigen::MatrixXd& m : matrices) mean += m;
  mean /= static_cast<double>(matrices.size());

  bool warned = false;
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v = std::floor(mean(i, j) + 0.5);  // half-up
      if (v < 0.0) {
        if (!warned && warnings)
          *warnings << "warning: negative count mean clamped to 0\n";
        warned = true;
        v = 0.0;
      }
      out(i, j) = i == j ? 0.0 : v;
    }
  }
  return out;
}

}  // namespace mlwsbm
