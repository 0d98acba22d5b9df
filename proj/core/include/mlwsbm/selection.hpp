#pragma once

#include "mlwsbm/baselines.hpp"
#include "mlwsbm/inference.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mlwsbm {

/// Normalized mutual information 2 I(a;b) / (H(a) + H(b)) with natural-log
/// entropies; 1 when both partitions are single-cluster.
double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

/// Newman modularity Q = (1/2m) sum_ij (A_ij - d_i d_j / 2m) delta(c_i, c_j),
/// weights used as-is. Throws on an empty graph (2m = 0).
double modularity(const Eigen::MatrixXd& adjacency, const std::vector<int>& labels);

/// BIC = 2 lhat - nu log(n(n-1)/2) with lhat the complete-data log-likelihood
/// at MAP labels and posterior-mean theta, and
/// nu = d_theta K(K+1)/2 + (K-1). Higher is better.
double bic(const Eigen::MatrixXd& layer, const WeightFamily& family, const FitResult& fit);

struct ScanCurve {
  std::vector<int> k_values;
  std::vector<double> scores;
  int best_k = 0;  // argmax, ties to the smallest K
  double max_elbo_dip = 0.0;  // worst over the scan's fits
};

/// Fit single-layer VB at every K in range and score by BIC.
ScanCurve select_k_total(const Eigen::MatrixXd& layer, const WeightFamily& family,
                         const std::vector<int>& k_range, const InferenceOptions& options,
                         int threads = 1);

/// Joint fit at every candidate K; score = sum over layers of the
/// modularity of the fitted labels.
ScanCurve select_k_shared(const MultilayerGraph& graphs, const std::vector<int>& k_total,
                          const std::vector<int>& k_range, const InferenceOptions& options,
                          int threads = 1);

struct SelectionReport {
  std::vector<ScanCurve> per_layer_bic;
  std::vector<int> per_layer_k;
  ScanCurve shared_modularity;
  int shared_k = 0;
  std::vector<int> private_counts;  // K^(l) - K per layer
  FitResult final_fit;              // joint fit at the selected (K, K^(l))
  double max_elbo_dip = 0.0;        // worst over the whole pipeline
};

/// The two-stage pipeline: per-layer K^(l) by BIC over k_total_range, then
/// shared K by modularity over [2, min K^(l)] (clipped to the feasible set).
SelectionReport select_pipeline(const MultilayerGraph& graphs,
                                const std::vector<int>& k_total_range,
                                const InferenceOptions& options, int threads = 1);

std::string selection_report_to_json(const SelectionReport& report);

}  // namespace mlwsbm
