#include "mlwsbm/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mlwsbm {

namespace {

int sample_categorical(const Eigen::VectorXd& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  double acc = 0.0;
  for (int k = 0; k < probs.size(); ++k) {
    acc += probs(k);
    if (u < acc) return k + 1;
  }
  return static_cast<int>(probs.size());
}

// Counts as equal as possible (remainder on the lowest labels), shuffled.
std::vector<int> balanced_labels(int count, int k, std::mt19937_64& rng) {
  std::vector<int> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(i % k + 1);
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace

void MultilayerGraph::validate() const {
  if (layers.size() != families.size())
    throw std::domain_error("graph: one family per layer required");
  for (int l = 0; l < num_layers(); ++l) {
    const Eigen::MatrixXd& a = layers[l];
    if (a.rows() != a.cols() || a.rows() != n())
      throw std::domain_error("graph: layer " + std::to_string(l + 1) +
                              " is not square over the common vertex set");
    for (int i = 0; i < a.rows(); ++i) {
      if (a(i, i) != 0.0)
        throw std::domain_error("graph: nonzero diagonal at layer " +
                                std::to_string(l + 1) + ", vertex " + std::to_string(i));
      for (int j = i + 1; j < a.cols(); ++j) {
        if (a(i, j) != a(j, i))
          throw std::domain_error("graph: asymmetric entry at layer " +
                                  std::to_string(l + 1) + ", pair (" +
                                  std::to_string(i) + "," + std::to_string(j) + ")");
        if (!families[l].admissible_weight(a(i, j)))
          throw std::domain_error("graph: weight " + std::to_string(a(i, j)) +
                                  " at layer " + std::to_string(l + 1) + ", pair (" +
                                  std::to_string(i) + "," + std::to_string(j) +
                                  ") not admissible for " + families[l].name() +
                                  " family");
      }
    }
  }
}

Eigen::VectorXd GeneratorConfig::mu0_for(int layer) const {
  if (!mu0.empty() && mu0[layer].size() > 0) return mu0[layer];
  return Eigen::VectorXd::Constant(k_total[layer], 1.0 / k_total[layer]);
}

void GeneratorConfig::validate() const {
  if (n <= 0 || num_layers <= 0) throw std::domain_error("generator: n and L must be positive");
  if (static_cast<int>(k_total.size()) != num_layers)
    throw std::domain_error("generator: one K^(l) per layer required");
  if (static_cast<int>(families.size()) != num_layers)
    throw std::domain_error("generator: one family per layer required");
  const int k_min = *std::min_element(k_total.begin(), k_total.end());
  if (k_shared < 0 || k_shared > k_min)
    throw std::domain_error("generator: K must satisfy 0 <= K <= min_l K^(l)");
  for (int l = 0; l < num_layers; ++l) {
    if (k_total[l] < 1) throw std::domain_error("generator: K^(l) must be >= 1");
    const Eigen::VectorXd m = mu0_for(l);
    if (m.size() != k_total[l] || m.minCoeff() < 0.0 || std::abs(m.sum() - 1.0) > 1e-9)
      throw std::domain_error("generator: mu0 of layer " + std::to_string(l + 1) +
                              " must be a probability vector of length K^(l)");
    if (theta.size() != static_cast<size_t>(num_layers))
      throw std::domain_error("generator: one theta per layer required");
    const Eigen::MatrixXd& t = theta[l];
    if (t.rows() != k_total[l] || t.cols() != k_total[l])
      throw std::domain_error("generator: theta of layer " + std::to_string(l + 1) +
                              " has wrong shape");
    if (!t.isApprox(t.transpose()))
      throw std::domain_error("generator: theta of layer " + std::to_string(l + 1) +
                              " must be symmetric");
  }
}

CommunityStructure sample_labels(const GeneratorConfig& config, std::mt19937_64& rng) {
  config.validate();
  const int n = config.n, L = config.num_layers, K = config.k_shared;
  CommunityStructure s;
  s.labels.assign(L, std::vector<int>(n, 0));

  if (config.label_mode == LabelMode::Multinomial) {
    const Eigen::VectorXd mu1 = config.mu0_for(0);
    for (int i = 0; i < n; ++i) s.labels[0][i] = sample_categorical(mu1, rng);
    for (int l = 1; l < L; ++l) {
      const Eigen::VectorXd mul = config.mu0_for(l);
      for (int i = 0; i < n; ++i)
        s.labels[l][i] = s.labels[0][i] <= K ? s.labels[0][i] : sample_categorical(mul, rng);
    }
  } else {
    s.labels[0] = balanced_labels(n, config.k_total[0], rng);
    std::vector<int> unshared;
    for (int i = 0; i < n; ++i)
      if (s.labels[0][i] > K) unshared.push_back(i);
    for (int l = 1; l < L; ++l) {
      const std::vector<int> fresh =
          balanced_labels(static_cast<int>(unshared.size()), config.k_total[l], rng);
      for (int i = 0; i < n; ++i) s.labels[l][i] = s.labels[0][i] <= K ? s.labels[0][i] : 0;
      for (size_t u = 0; u < unshared.size(); ++u) s.labels[l][unshared[u]] = fresh[u];
    }
  }
  return s;
}

MultilayerGraph sample_graph(const GeneratorConfig& config,
                             const CommunityStructure& structure,
                             std::mt19937_64& rng) {
  config.validate();
  const int n = config.n, L = config.num_layers;
  if (structure.num_layers() != L || structure.n() != n)
    throw std::domain_error("sample_graph: structure shape does not match config");

  MultilayerGraph g;
  g.families = config.families;
  g.layers.reserve(L);
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const Eigen::MatrixXd& theta = config.theta[l];
    for (int i = 0; i < n; ++i) {
      const int gi = structure.labels[l][i];
      for (int j = i + 1; j < n; ++j) {
        const int gj = structure.labels[l][j];
        const double w = config.families[l].sample_weight(theta(gi - 1, gj - 1), rng);
        a(i, j) = w;
        a(j, i) = w;
      }
    }
    g.layers.push_back(std::move(a));
  }
  return g;
}

Eigen::MatrixXd planted_theta(double p, double q, int k_total) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(k_total, k_total, q);
  t.diagonal().setConstant(p);
  return t;
}

}  // namespace mlwsbm
