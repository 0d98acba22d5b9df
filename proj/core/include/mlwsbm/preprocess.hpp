#pragma once

#include <Eigen/Core>

#include <iosfwd>

namespace mlwsbm {

struct Threshold {
  enum class Kind { Mean, Value };
  Kind kind = Kind::Mean;
  double value = 0.0;

  static Threshold mean() { return {Kind::Mean, 0.0}; }
  static Threshold at(double t) { return {Kind::Value, t}; }
};

/// Binarize a correlation matrix: entry 1 iff strictly above the threshold
/// (mean thresholds are computed over off-diagonal entries only); zero
/// diagonal.
Eigen::MatrixXd preprocess_correlation(const Eigen::MatrixXd& matrix, Threshold threshold);

/// Entrywise mean over the stack, rounded half-up to the nearest
/// nonnegative integer (negative means clamp to 0 with a warning);
/// zero diagonal.
Eigen::MatrixXd preprocess_counts(const std::vector<Eigen::MatrixXd>& matrices,
                                  std::ostream* warnings = nullptr);

}  // namespace mlwsbm
