#pragma once

#include "mlwsbm/inference.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mlwsbm {

enum class LaplacianKind { NormalizedSymmetric };

struct SpectralOptions {
  int k = 2;
  LaplacianKind laplacian = LaplacianKind::NormalizedSymmetric;
  int kmeans_restarts = 10;
  std::uint64_t seed = 0;
};

/// Ng-Jordan-Weiss spectral clustering: L = I - D^{-1/2} A D^{-1/2}
/// (isolated vertices keep zero rows), the k eigenvectors of smallest
/// eigenvalue, unit-normalized rows, then k-means with greedy
/// farthest-point seeding per restart. Returns 1-based labels.
std::vector<int> spectral_clustering(const Eigen::MatrixXd& adjacency,
                                     const SpectralOptions& options);

/// Mean-field VB on one layer alone: inference::run with L = 1 and no
/// shared block.
FitResult single_layer_vb(const Eigen::MatrixXd& layer, const WeightFamily& family,
                          int k_total, const InferenceOptions& options);

}  // namespace mlwsbm
