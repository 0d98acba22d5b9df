#include "mlwsbm/selection.hpp"

#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mlwsbm {

namespace {

double entropy(const std::map<int, long>& counts, double n) {
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = c / n;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

int argmax_smallest_k(const ScanCurve& curve) {
  int best = 0;
  for (size_t i = 1; i < curve.scores.size(); ++i)
    if (curve.scores[i] > curve.scores[best]) best = static_cast<int>(i);
  return curve.k_values[best];
}

nlohmann::json curve_to_json(const ScanCurve& c) {
  nlohmann::json j;
  j["k"] = c.k_values;
  j["score"] = c.scores;
  j["best_k"] = c.best_k;
  return j;
}

}  // namespace

double nmi(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size() || labels_a.empty())
    throw std::invalid_argument("nmi: label vectors must have equal positive length");
  const double n = static_cast<double>(labels_a.size());
  std::map<int, long> ca, cb;
  std::map<std::pair<int, int>, long> joint;
  for (size_t i = 0; i < labels_a.size(); ++i) {
    ca[labels_a[i]]++;
    cb[labels_b[i]]++;
    joint[{labels_a[i], labels_b[i]}]++;
  }
  const double ha = entropy(ca, n), hb = entropy(cb, n);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  double mi = 0.0;
  for (const auto& [pair, c] : joint) {
    const double pij = c / n;
    const double pi = ca[pair.first] / n;
    const double pj = cb[pair.second] / n;
    mi += pij * std::log(pij / (pi * pj));
  }
  return 2.0 * mi / (ha + hb);
}

double modularity(const Eigen::MatrixXd& adjacency, const std::vector<int>& labels) {
  const int n = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != n || static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("modularity: dimensions inconsistent");
  const double two_m = adjacency.sum();
  if (!(two_m > 0.0)) throw std::domain_error("modularity: empty graph (2m = 0)");
  const Eigen::VectorXd degree = adjacency.rowwise().sum();

  double within = 0.0;
  std::map<int, double> volume;
  for (int i = 0; i < n; ++i) {
    volume[labels[i]] += degree(i);
    for (int j = 0; j < n; ++j)
      if (labels[i] == labels[j]) within += adjacency(i, j);
  }
  double null = 0.0;
  for (const auto& [label, vol] : volume) null += (vol / two_m) * (vol / two_m);
  return within / two_m - null;
}

double bic(const Eigen::MatrixXd& layer, const WeightFamily& family, const FitResult& fit) {
  const int n = static_cast<int>(layer.rows());
  const int k = fit.state.k_total.at(0);
  const std::vector<int>& labels = fit.labels.labels.at(0);

  // Posterior-mean theta per block from the fitted tau.
  Eigen::MatrixXd theta(k, k);
  ConjugateParams p;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      p.tau = fit.state.tau[0].at(a, b);
      theta(a, b) = family.posterior_mean(p);
    }
  }
  std::vector<double> freq(k, 0.0);
  for (int i = 0; i < n; ++i) freq[labels[i] - 1] += 1.0 / n;

  double lhat = 0.0;
  for (int i = 0; i < n; ++i) {
    lhat += std::log(freq[labels[i] - 1]);
    for (int j = i + 1; j < n; ++j)
      lhat += family.log_density(layer(i, j), theta(labels[i] - 1, labels[j] - 1));
  }
  const double pairs = 0.5 * n * (n - 1.0);
  const double nu = family.theta_dim() * (k * (k + 1.0) / 2.0) + (k - 1.0);
  return 2.0 * lhat - nu * std::log(pairs);
}

ScanCurve select_k_total(const Eigen::MatrixXd& layer, const WeightFamily& family,
                         const std::vector<int>& k_range, const InferenceOptions& options,
                         int threads) {
  if (k_range.empty()) throw std::invalid_argument("select_k_total: empty K range");
  ScanCurve curve;
  curve.k_values = k_range;
  curve.scores.resize(k_range.size());
  std::vector<double> dips(k_range.size(), 0.0);
  detail::parallel_for(static_cast<int>(k_range.size()), threads, [&](int i) {
    const FitResult fit = single_layer_vb(layer, family, k_range[i], options);
    curve.scores[i] = bic(layer, family, fit);
    dips[i] = fit.max_elbo_dip;
  });
  curve.best_k = argmax_smallest_k(curve);
  curve.max_elbo_dip = *std::max_element(dips.begin(), dips.end());
  return curve;
}

ScanCurve select_k_shared(const MultilayerGraph& graphs, const std::vector<int>& k_total,
                          const std::vector<int>& k_range, const InferenceOptions& options,
                          int threads) {
  if (k_range.empty()) throw std::invalid_argument("select_k_shared: empty K range");
  const int k_min = *std::min_element(k_total.begin(), k_total.end());
  for (int k : k_range)
    if (k < 2 || k > k_min)
      throw std::invalid_argument("select_k_shared: K range must lie in [2, min K^(l)]");
  ScanCurve curve;
  curve.k_values = k_range;
  curve.scores.resize(k_range.size());
  std::vector<double> dips(k_range.size(), 0.0);
  detail::parallel_for(static_cast<int>(k_range.size()), threads, [&](int i) {
    const FitResult fit = run(graphs, k_range[i], k_total, options);
    double q = 0.0;
    for (int l = 0; l < graphs.num_layers(); ++l)
      q += modularity(graphs.layers[l], fit.labels.labels[l]);
    curve.scores[i] = q;
    dips[i] = fit.max_elbo_dip;
  });
  curve.best_k = argmax_smallest_k(curve);
  curve.max_elbo_dip = *std::max_element(dips.begin(), dips.end());
  return curve;
}

SelectionReport select_pipeline(const MultilayerGraph& graphs,
                                const std::vector<int>& k_total_range,
                                const InferenceOptions& options, int threads) {
  SelectionReport report;
  for (int l = 0; l < graphs.num_layers(); ++l) {
    report.per_layer_bic.push_back(select_k_total(graphs.layers[l], graphs.families[l],
                                                  k_total_range, options, threads));
    report.per_layer_k.push_back(report.per_layer_bic.back().best_k);
    report.max_elbo_dip = std::max(report.max_elbo_dip, report.per_layer_bic.back().max_elbo_dip);
  }
  const int k_min =
      *std::min_element(report.per_layer_k.begin(), report.per_layer_k.end());
  std::vector<int> shared_range;
  for (int k = 2; k <= k_min; ++k) shared_range.push_back(k);
  if (shared_range.empty())
    throw std::domain_error("select: no feasible shared K (min K^(l) < 2)");
  report.shared_modularity =
      select_k_shared(graphs, report.per_layer_k, shared_range, options, threads);
  report.shared_k = report.shared_modularity.best_k;
  for (int l = 0; l < graphs.num_layers(); ++l)
    report.private_counts.push_back(report.per_layer_k[l] - report.shared_k);
  report.final_fit = run(graphs, report.shared_k, report.per_layer_k, options);
  report.max_elbo_dip = std::max({report.max_elbo_dip, report.shared_modularity.max_elbo_dip,
                                  report.final_fit.max_elbo_dip});
  return report;
}

std::string selection_report_to_json(const SelectionReport& report) {
  nlohmann::json j;
  for (const auto& c : report.per_layer_bic) j["bic_curves"].push_back(curve_to_json(c));
  j["per_layer_k"] = report.per_layer_k;
  j["modularity_curve"] = curve_to_json(report.shared_modularity);
  j["shared_k"] = report.shared_k;
  j["private_counts"] = report.private_counts;
  j["final_labels"] = report.final_fit.labels.labels;
  std::vector<bool> shared(report.final_fit.shared.begin(), report.final_fit.shared.end());
  j["final_shared_flags"] = shared;
  j["final_converged"] = report.final_fit.converged;
  return j.dump(2);
}

}  // namespace mlwsbm
