#pragma once

#include "mlwsbm/exponfam.hpp"
#include "mlwsbm/generator.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace mlwsbm {

/* Symmetric K x K grid of per-block conjugate parameters for one layer. */
class BlockGrid {
 public:
  BlockGrid() = default;
  BlockGrid(int k, const Eigen::VectorXd& init)
      : k_(k), blocks_(static_cast<size_t>(k) * k, init) {}

  int k() const { return k_; }
  Eigen::VectorXd& at(int a, int b) { return blocks_[static_cast<size_t>(a) * k_ + b]; }
  const Eigen::VectorXd& at(int a, int b) const {
    return blocks_[static_cast<size_t>(a) * k_ + b];
  }

 private:
  int k_ = 0;
  std::vector<Eigen::VectorXd> blocks_;
};

/* The four shared/private block quadrants of a layer's theta matrix. */
enum class BlockQuadrant { SharedShared, SharedPrivate, PrivateShared, PrivatePrivate };

/// Quadrant of community pair (a, b), 1-based labels, given K shared.
BlockQuadrant quadrant_of(int a, int b, int k_shared);

enum class InitMode { Spectral, Random, Provided };

struct InferenceOptions {
  double tol = 1e-6;
  int max_outer = 100;
  int max_inner = 50;
  int restarts = 5;
  InitMode init = InitMode::Spectral;
  double damping = 0.0;    // mu_new = (1-d) * update + d * old
  bool prior_in_mu = false;
  std::uint64_t seed = 0;
  /// Per-layer hyperparameter overrides; empty = family defaults.
  std::vector<Eigen::VectorXd> tau0;
  /// Per-layer label priors; empty = uniform.
  std::vector<Eigen::VectorXd> mu0;
  /// Initial memberships when init == Provided (one n x K^(l) matrix per layer).
  std::vector<Eigen::MatrixXd> init_mu;

  void validate() const;
};

/* Variational parameters of the joint fit: per-layer row-stochastic
 * memberships mu^(l), per-block posterior hyperparameters tau^(l), and a
 * log-score staging area that the mu updates write and normalize_mu folds
 * back into mu. Unstaged columns hold log(mu), so normalizing is the
 * identity on them.
 */
struct VariationalState {
  std::vector<Eigen::MatrixXd> mu;
  std::vector<BlockGrid> tau;
  std::vector<Eigen::MatrixXd> log_scores;
  std::vector<double> elbo_trace;

  int k_shared = 0;
  std::vector<int> k_total;
  std::vector<Eigen::VectorXd> tau0;     // resolved per layer
  std::vector<Eigen::VectorXd> log_mu0;  // resolved per layer
  bool prior_in_mu = false;
  bool converged = false;
  std::uint64_t seed = 0;

  int n() const { return mu.empty() ? 0 : static_cast<int>(mu[0].rows()); }
  int num_layers() const { return static_cast<int>(mu.size()); }
};

struct MapResult {
  CommunityStructure labels;     // per-layer argmax, ties to the lowest index
  std::vector<bool> shared;      // layer-1 argmax lies in 1..K
};

struct FitResult {
  VariationalState state;
  CommunityStructure labels;
  std::vector<bool> shared;
  bool converged = false;
  /// Worst relative ELBO decrease between consecutive entries of the
  /// reported trace (0 when the trace is non-decreasing).
  double max_elbo_dip = 0.0;
};

/// Build the initial state: spectral (per-layer spectral clustering, greedy
/// cross-layer alignment of the shared block, soft labels), random
/// (Dirichlet(1) rows) or provided. Layer 1's shared block is copied to all
/// layers and rows renormalized.
VariationalState init_state(const MultilayerGraph& graphs, int k_shared,
                            const std::vector<int>& k_total,
                            const InferenceOptions& options, std::mt19937_64& rng);

/// tau^(l)_{ab} = tau0^(l) + sum_{i != j} T(A_ij) mu_ia mu_jb (ordered pairs).
void update_tau(VariationalState& state, const MultilayerGraph& graphs);

/// Stage shared log-scores: (1/L) sum_l sum_{j != i} sum_b T(A_ij) mu_jb
/// etabar_(k,b), identical across layers (the copy step). Every layer's
/// score row enters reduced by its mean, so layers of different weight
/// families combine on a common evidence-ratio scale.
void update_mu_shared(VariationalState& state, const MultilayerGraph& graphs);

/// Stage private log-scores per layer, no cross-layer averaging (rows
/// mean-reduced as in update_mu_shared).
void update_mu_private(VariationalState& state, const MultilayerGraph& graphs);

/// Row-wise softmax of the staged log-scores (max-subtraction).
void normalize_mu(VariationalState& state);

/// Evidence lower bound G(q) of the current state.
double elbo(const VariationalState& state, const MultilayerGraph& graphs);

struct ElboTerms {
  double likelihood = 0.0;
  double theta_divergence = 0.0;  // -sum KL(q(theta) || prior), <= 0
  double label = 0.0;
  double total() const { return likelihood + theta_divergence + label; }
};
ElboTerms elbo_terms(const VariationalState& state, const MultilayerGraph& graphs);

/// MAP labels per layer plus the shared/unshared flag (layer-1 convention).
MapResult map_labels(const VariationalState& state);

/// Best-of-restarts coordinate ascent: alternate update_tau with an inner
/// mu loop (shared update incl. copy, private update, normalize) until
/// max |delta mu| < tol or the iteration caps.
FitResult run(const MultilayerGraph& graphs, int k_shared, std::vector<int> k_total,
              const InferenceOptions& options);

/// Serialized fit: {"mu", "tau", "elbo_trace", "labels", "shared",
/// "converged", "seed", ...}; see docs/FORMATS.md.
std::string fit_to_json(const FitResult& fit);

}  // namespace mlwsbm
