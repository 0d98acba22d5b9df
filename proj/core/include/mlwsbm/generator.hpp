#pragma once

#include "mlwsbm/exponfam.hpp"

#include <Eigen/Core>

#include <random>
#include <vector>

namespace mlwsbm {

/* L symmetric weighted adjacency matrices over a common vertex set,
 * each with its own edge-weight family. No self-loops.
 */
struct MultilayerGraph {
  std::vector<Eigen::MatrixXd> layers;
  std::vector<WeightFamily> families;

  int n() const { return layers.empty() ? 0 : static_cast<int>(layers[0].rows()); }
  int num_layers() const { return static_cast<int>(layers.size()); }

  /// Throws std::domain_error on asymmetry, nonzero diagonal or an
  /// inadmissible weight (names the first offending entry).
  void validate() const;
};

/* Per-layer community labels, 1-based. Indices 1..K are shared: a vertex
 * whose layer-1 label is <= K carries that label in every layer.
 */
struct CommunityStructure {
  std::vector<std::vector<int>> labels;

  int n() const { return labels.empty() ? 0 : static_cast<int>(labels[0].size()); }
  int num_layers() const { return static_cast<int>(labels.size()); }
};

enum class LabelMode {
  Multinomial,  // label counts balanced in expectation
  Balanced      // as-equal-as-possible counts, shuffled
};

struct GeneratorConfig {
  int n = 0;
  int num_layers = 0;
  int k_shared = 0;
  std::vector<int> k_total;
  /// Per-layer label priors mu0; empty means uniform over 1..K^(l).
  std::vector<Eigen::VectorXd> mu0;
  /// Per-layer symmetric K^(l) x K^(l) block parameter matrices.
  std::vector<Eigen::MatrixXd> theta;
  std::vector<WeightFamily> families;
  LabelMode label_mode = LabelMode::Multinomial;

  /// Resolved mu0 for layer l (uniform when unset).
  Eigen::VectorXd mu0_for(int layer) const;
  void validate() const;
};

/// Draw per-layer labels: layer-1 categorical, copy when shared (<= K),
/// otherwise an independent categorical per remaining layer.
CommunityStructure sample_labels(const GeneratorConfig& config, std::mt19937_64& rng);

/// Draw every layer's weights: one draw per unordered pair from the block
/// parameter of its endpoint communities, mirrored; zero diagonal.
MultilayerGraph sample_graph(const GeneratorConfig& config,
                             const CommunityStructure& structure,
                             std::mt19937_64& rng);

/// The planted matrix (p-q) I + q 11^T: p on the diagonal, q elsewhere.
Eigen::MatrixXd planted_theta(double p, double q, int k_total);

}  // namespace mlwsbm
