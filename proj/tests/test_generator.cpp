#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlwsbm/generator.hpp"

#include <cmath>
#include <random>

using namespace mlwsbm;

namespace {

GeneratorConfig two_layer_config(int n, double p, double q, double q2) {
  GeneratorConfig c;
  c.n = n;
  c.num_layers = 2;
  c.k_shared = 2;
  c.k_total = {4, 4};
  c.families = {WeightFamily(FamilyKind::Bernoulli), WeightFamily(FamilyKind::Bernoulli)};
  c.theta = {planted_theta(p, q, 4), planted_theta(p, q2, 4)};
  return c;
}

Eigen::VectorXd one_hot(int k, int hot) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(k);
  v(hot - 1) = 1.0;
  return v;
}

void check_coupling(const CommunityStructure& s, int k_shared) {
  for (int i = 0; i < s.n(); ++i)
    if (s.labels[0][i] <= k_shared)
      for (int l = 1; l < s.num_layers(); ++l) CHECK(s.labels[l][i] == s.labels[0][i]);
}

}  // namespace

TEST_CASE("planted theta shape") {
  const Eigen::MatrixXd t = planted_theta(0.6, 0.2, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(t(a, b) == (a == b ? 0.6 : 0.2));
  CHECK(planted_theta(0.3, 0.3, 5).isApproxToConstant(0.3));
  const Eigen::MatrixXd hard = planted_theta(0.6, 0.5, 4);
  CHECK(hard(0, 0) == 0.6);
  CHECK(hard(0, 1) == 0.5);
}

TEST_CASE("label coupling invariant") {
  std::mt19937_64 rng(1);
  GeneratorConfig c = two_layer_config(200, 0.6, 0.2, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const CommunityStructure s = sample_labels(c, rng);
    check_coupling(s, c.k_shared);
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < c.n; ++i) {
        CHECK(s.labels[l][i] >= 1);
        CHECK(s.labels[l][i] <= c.k_total[l]);
      }
  }
}

TEST_CASE("degenerate one-hot priors") {
  std::mt19937_64 rng(2);
  GeneratorConfig c = two_layer_config(100, 0.6, 0.2, 0.2);

  c.mu0 = {one_hot(4, 1), Eigen::VectorXd()};
  CommunityStructure s = sample_labels(c, rng);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < c.n; ++i) CHECK(s.labels[l][i] == 1);

  // Layer-1 prior concentrated on a private community: layer 2 resamples
  // from its own prior, independent of layer 1.
  c.mu0 = {one_hot(4, 3), Eigen::VectorXd()};
  s = sample_labels(c, rng);
  int hits[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < c.n; ++i) {
    CHECK(s.labels[0][i] == 3);
    hits[s.labels[1][i]]++;
  }
  // All four layer-2 communities get mass under the uniform prior.
  for (int k = 1; k <= 4; ++k) CHECK(hits[k] > 0);
}

TEST_CASE("shared fraction concentrates at K/K_total") {
  std::mt19937_64 rng(3);
  GeneratorConfig c = two_layer_config(500, 0.6, 0.2, 0.2);
  const CommunityStructure s = sample_labels(c, rng);
  int shared = 0;
  for (int i = 0; i < c.n; ++i)
    if (s.labels[0][i] <= c.k_shared) ++shared;
  const double frac = static_cast<double>(shared) / c.n;
  const double sigma = std::sqrt(0.5 * 0.5 / c.n);
  CHECK(std::abs(frac - 0.5) < 3.0 * sigma);
}

TEST_CASE("balanced label mode gives near-equal counts") {
  std::mt19937_64 rng(4);
  GeneratorConfig c = two_layer_config(200, 0.6, 0.2, 0.2);
  c.label_mode = LabelMode::Balanced;
  const CommunityStructure s = sample_labels(c, rng);
  check_coupling(s, c.k_shared);
  int counts[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < c.n; ++i) counts[s.labels[0][i]]++;
  for (int k = 1; k <= 4; ++k) CHECK(counts[k] == 50);
}

TEST_CASE("empty graph from all-zero Bernoulli theta") {
  std::mt19937_64 rng(5);
  GeneratorConfig c = two_layer_config(30, 0.0, 0.0, 0.0);
  const CommunityStructure s = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, s, rng);
  CHECK(g.layers[0].cwiseAbs().sum() == 0.0);
  CHECK(g.layers[1].cwiseAbs().sum() == 0.0);
}

TEST_CASE("sampled graphs are symmetric, hollow and admissible") {
  std::mt19937_64 rng(6);
  GeneratorConfig c = two_layer_config(60, 0.6, 0.2, 0.4);
  c.families[1] = WeightFamily(FamilyKind::Poisson);
  c.theta[1] = planted_theta(3.0, 1.0, 4);
  const CommunityStructure s = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, s, rng);
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("block densities concentrate on planted theta") {
  std::mt19937_64 rng(7);
  GeneratorConfig c = two_layer_config(500, 0.6, 0.2, 0.2);
  const CommunityStructure s = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, s, rng);

  long within_pairs = 0, within_edges = 0, between_pairs = 0, between_edges = 0;
  for (int i = 0; i < c.n; ++i)
    for (int j = i + 1; j < c.n; ++j) {
      if (s.labels[0][i] == s.labels[0][j]) {
        ++within_pairs;
        within_edges += static_cast<long>(g.layers[0](i, j));
      } else {
        ++between_pairs;
        between_edges += static_cast<long>(g.layers[0](i, j));
      }
    }
  const double p_hat = static_cast<double>(within_edges) / within_pairs;
  const double q_hat = static_cast<double>(between_edges) / between_pairs;
  CHECK(std::abs(p_hat - 0.6) < 3.0 * std::sqrt(0.6 * 0.4 / within_pairs));
  CHECK(std::abs(q_hat - 0.2) < 3.0 * std::sqrt(0.2 * 0.8 / between_pairs));
}

TEST_CASE("Poisson layer total weight concentrates") {
  std::mt19937_64 rng(8);
  GeneratorConfig c;
  c.n = 500;
  c.num_layers = 1;
  c.k_shared = 0;
  c.k_total = {2};
  c.families = {WeightFamily(FamilyKind::Poisson)};
  const double rate = 2.0;
  c.theta = {planted_theta(rate, rate, 2)};
  const CommunityStructure s = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, s, rng);
  const double pairs = 0.5 * c.n * (c.n - 1.0);
  const double total = 0.5 * g.layers[0].sum();
  CHECK(std::abs(total - rate * pairs) < 3.0 * std::sqrt(rate * pairs));
}

TEST_CASE("sampling is bit-reproducible under a fixed seed") {
  GeneratorConfig c = two_layer_config(50, 0.6, 0.2, 0.35);
  std::mt19937_64 rng_a(99), rng_b(99);
  const CommunityStructure sa = sample_labels(c, rng_a);
  const CommunityStructure sb = sample_labels(c, rng_b);
  CHECK(sa.labels == sb.labels);
  const MultilayerGraph ga = sample_graph(c, sa, rng_a);
  const MultilayerGraph gb = sample_graph(c, sb, rng_b);
  for (int l = 0; l < 2; ++l) CHECK(ga.layers[l] == gb.layers[l]);
}

TEST_CASE("config validation") {
  GeneratorConfig c = two_layer_config(50, 0.6, 0.2, 0.3);
  c.k_shared = 5;  // exceeds min K^(l)
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = two_layer_config(50, 0.6, 0.2, 0.3);
  c.mu0 = {Eigen::VectorXd::Constant(4, 0.5), Eigen::VectorXd()};  // sums to 2
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = two_layer_config(50, 0.6, 0.2, 0.3);
  c.theta[0](0, 1) = 0.9;  // asymmetric
  CHECK_THROWS_AS(c.validate(), std::domain_error);
}

TEST_CASE("graph validation catches bad inputs") {
  MultilayerGraph g;
  g.families = {WeightFamily(FamilyKind::Bernoulli)};
  g.layers = {Eigen::MatrixXd::Zero(3, 3)};
  CHECK_NOTHROW(g.validate());
  g.layers[0](0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g.layers[0](1, 0) = 1.0;
  CHECK_NOTHROW(g.validate());
  g.layers[0](2, 2) = 1.0;  // diagonal
  CHECK_THROWS_AS(g.validate(), std::domain_error);
  g.layers[0](2, 2) = 0.0;
  g.layers[0](0, 2) = g.layers[0](2, 0) = 3.0;  // weight 3 on a Bernoulli layer
  CHECK_THROWS_AS(g.validate(), std::domain_error);
}
