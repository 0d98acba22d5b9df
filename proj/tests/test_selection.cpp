#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mlwsbm/generator.hpp"
#include "mlwsbm/selection.hpp"

#include <cmath>
#include <random>

using namespace mlwsbm;

namespace {

Eigen::MatrixXd two_cliques(int c) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * c, 2 * c);
  for (int i = 0; i < 2 * c; ++i)
    for (int j = 0; j < 2 * c; ++j)
      if (i != j && (i < c) == (j < c)) a(i, j) = 1.0;
  return a;
}

InferenceOptions fast_options(std::uint64_t seed) {
  InferenceOptions opt;
  opt.seed = seed;
  opt.restarts = 2;
  return opt;
}

}  // namespace

TEST_CASE("nmi ground truths") {
  CHECK(nmi({1, 2, 3, 1}, {1, 2, 3, 1}) == doctest::Approx(1.0));
  CHECK(nmi({2, 2, 1, 1}, {4, 4, 7, 7}) == doctest::Approx(1.0));  // relabeling
  CHECK(nmi({1, 1, 1, 1}, {1, 2, 1, 2}) == doctest::Approx(0.0));
  CHECK(nmi({1, 1}, {1, 1}) == doctest::Approx(1.0));  // both single-cluster

  // Hand computation for a = (1,1,2,2), b = (1,2,2,2) from the 2x2
  // contingency table (natural logs).
  const double ha = std::log(2.0);
  const double hb = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  const double mi = 0.25 * std::log(0.25 / (0.5 * 0.25)) +
                    0.25 * std::log(0.25 / (0.5 * 0.75)) +
                    0.5 * std::log(0.5 / (0.5 * 0.75));
  CHECK(nmi({1, 1, 2, 2}, {1, 2, 2, 2}) == doctest::Approx(2 * mi / (ha + hb)).epsilon(1e-12));

  CHECK(nmi({1, 2, 1}, {2, 1, 2}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(nmi({1, 2}, {1, 2, 3}), std::invalid_argument);

  // Symmetry and range on random partitions.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> a(50), b(50);
    for (int i = 0; i < 50; ++i) {
      a[i] = 1 + static_cast<int>(rng() % 4);
      b[i] = 1 + static_cast<int>(rng() % 3);
    }
    const double ab = nmi(a, b);
    CHECK(ab == doctest::Approx(nmi(b, a)).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("modularity ground truths") {
  const Eigen::MatrixXd a = two_cliques(5);
  std::vector<int> split(10, 1);
  for (int i = 5; i < 10; ++i) split[i] = 2;
  CHECK(modularity(a, split) == doctest::Approx(0.5).epsilon(1e-14));

  const std::vector<int> one(10, 1);
  CHECK(modularity(a, one) == doctest::Approx(0.0).epsilon(1e-14));

  // Permuting label names changes nothing.
  std::vector<int> renamed(10, 7);
  for (int i = 5; i < 10; ++i) renamed[i] = 3;
  CHECK(modularity(a, renamed) == doctest::Approx(0.5).epsilon(1e-14));

  Eigen::MatrixXd empty = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_AS(modularity(empty, {1, 1, 2, 2}), std::domain_error);
}

TEST_CASE("random partitions of an Erdos-Renyi graph score near zero") {
  std::mt19937_64 rng(6);
  const int n = 500;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  const int reps = 20;
  for (int t = 0; t < reps; ++t) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u(rng) < 0.05) a(i, j) = a(j, i) = 1.0;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = 1 + static_cast<int>(rng() % 4);
    total += std::abs(modularity(a, labels));
  }
  CHECK(total / reps < 0.05);
}

TEST_CASE("weighted modularity uses weights as-is") {
  Eigen::MatrixXd a = two_cliques(4);
  a *= 3.0;  // count-valued weights
  std::vector<int> split(8, 1);
  for (int i = 4; i < 8; ++i) split[i] = 2;
  CHECK(modularity(a, split) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("bic is deterministic and prefers one block on empty graphs") {
  Eigen::MatrixXd empty = Eigen::MatrixXd::Zero(40, 40);
  const WeightFamily fam(FamilyKind::Bernoulli);
  std::vector<double> scores;
  for (int k : {1, 2, 3, 4}) {
    const FitResult fit = single_layer_vb(empty, fam, k, fast_options(7));
    scores.push_back(bic(empty, fam, fit));
  }
  for (size_t i = 1; i < scores.size(); ++i) CHECK(scores[0] > scores[i]);

  const FitResult fit = single_layer_vb(empty, fam, 2, fast_options(7));
  CHECK(bic(empty, fam, fit) == bic(empty, fam, fit));
}

TEST_CASE("select_k_total recovers a planted community count") {
  GeneratorConfig c;
  c.n = 200;
  c.num_layers = 1;
  c.k_shared = 0;
  c.k_total = {3};
  c.families = {WeightFamily(FamilyKind::Bernoulli)};
  c.theta = {planted_theta(0.6, 0.1, 3)};
  int hits = 0;
  const std::vector<int> k_range = {1, 2, 3, 4, 5};
  for (int s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(s);
    const CommunityStructure truth = sample_labels(c, rng);
    const MultilayerGraph g = sample_graph(c, truth, rng);
    const ScanCurve curve =
        select_k_total(g.layers[0], g.families[0], k_range, fast_options(60 + s));
    CHECK(curve.k_values == k_range);
    CHECK(curve.scores.size() == k_range.size());
    if (curve.best_k == 3) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("select_k_total on a singleton range returns that K") {
  Eigen::MatrixXd a = two_cliques(6);
  const ScanCurve curve =
      select_k_total(a, WeightFamily(FamilyKind::Bernoulli), {2}, fast_options(8));
  CHECK(curve.best_k == 2);
  CHECK(curve.scores.size() == 1);
}

TEST_CASE("no-signal graphs select a single community") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 120;
  int hits = 0;
  for (int s = 0; s < 5; ++s) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u(rng) < 0.3) a(i, j) = a(j, i) = 1.0;
    const ScanCurve curve = select_k_total(a, WeightFamily(FamilyKind::Bernoulli),
                                           {1, 2, 3, 4}, fast_options(70 + s));
    if (curve.best_k == 1) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("select_k_shared recovers the planted shared count") {
  GeneratorConfig c;
  c.n = 200;
  c.num_layers = 2;
  c.k_shared = 2;
  c.k_total = {4, 4};
  c.families = {WeightFamily(FamilyKind::Bernoulli), WeightFamily(FamilyKind::Bernoulli)};
  c.theta = {planted_theta(0.6, 0.2, 4), planted_theta(0.6, 0.2, 4)};
  int hits = 0;
  for (int s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(100 + s);
    const CommunityStructure truth = sample_labels(c, rng);
    const MultilayerGraph g = sample_graph(c, truth, rng);
    const ScanCurve curve = select_k_shared(g, {4, 4}, {2, 3, 4}, fast_options(80 + s));
    if (curve.best_k == 2) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("select_k_shared validates its range and handles singletons") {
  GeneratorConfig c;
  c.n = 60;
  c.num_layers = 2;
  c.k_shared = 2;
  c.k_total = {3, 3};
  c.families = {WeightFamily(FamilyKind::Bernoulli), WeightFamily(FamilyKind::Bernoulli)};
  c.theta = {planted_theta(0.6, 0.2, 3), planted_theta(0.6, 0.2, 3)};
  std::mt19937_64 rng(3);
  const CommunityStructure truth = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, truth, rng);

  const ScanCurve curve = select_k_shared(g, {3, 3}, {2}, fast_options(5));
  CHECK(curve.best_k == 2);
  CHECK_THROWS_AS(select_k_shared(g, {3, 3}, {1, 2}, fast_options(5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_k_shared(g, {3, 3}, {4}, fast_options(5)), std::invalid_argument);
}

TEST_CASE("selection report serializes curves and counts") {
  GeneratorConfig c;
  c.n = 80;
  c.num_layers = 2;
  c.k_shared = 2;
  c.k_total = {3, 3};
  c.families = {WeightFamily(FamilyKind::Bernoulli), WeightFamily(FamilyKind::Bernoulli)};
  c.theta = {planted_theta(0.7, 0.1, 3), planted_theta(0.7, 0.1, 3)};
  std::mt19937_64 rng(4);
  const CommunityStructure truth = sample_labels(c, rng);
  const MultilayerGraph g = sample_graph(c, truth, rng);
  const SelectionReport report = select_pipeline(g, {2, 3, 4}, fast_options(12), 2);
  CHECK(report.per_layer_k.size() == 2);
  CHECK(report.shared_k >= 2);
  CHECK(report.private_counts.size() == 2);
  const std::string json = selection_report_to_json(report);
  for (const char* key : {"\"bic_curves\"", "\"modularity_curve\"", "\"shared_k\"",
                          "\"per_layer_k\"", "\"private_counts\""})
    CHECK(json.find(key) != std::string::npos);
}
