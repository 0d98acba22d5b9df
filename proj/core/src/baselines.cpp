#include "mlwsbm/baselines.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace mlwsbm {

namespace {

struct KmeansResult {
  std::vector<int> assign;  // 0-based
  double inertia = std::numeric_limits<double>::infinity();
};

// Lloyd iterations from greedy farthest-point seeding: the first center is
// a random row, each next is the row farthest from its nearest chosen
// center (ties to the lowest index).
KmeansResult kmeans_once(const Eigen::MatrixXd& x, int k, std::mt19937_64& rng) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<int> pick(0, n - 1);
  centers.row(0) = x.row(pick(rng));
  Eigen::VectorXd nearest =
      (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    int far = 0;
    for (int i = 1; i < n; ++i)
      if (nearest(i) > nearest(far)) far = i;
    centers.row(c) = x.row(far);
    nearest = nearest.cwiseMin(
        (x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  KmeansResult r;
  r.assign.assign(n, 0);
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i) - centers.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (x.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (best != r.assign[i]) {
        r.assign[i] = best;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (int i = 0; i < n; ++i) {
      sums.row(r.assign[i]) += x.row(i);
      counts(r.assign[i])++;
    }
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        centers.row(c) = sums.row(c) / counts(c);
      } else {
        // Empty cluster: reseed at the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (x.row(i) - centers.row(r.assign[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(c) = x.row(far);
        changed = true;
      }
    }
    if (!changed && it > 0) break;
  }
  r.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    r.inertia += (x.row(i) - centers.row(r.assign[i])).squaredNorm();
  return r;
}

}  // namespace

std::vector<int> spectral_clustering(const Eigen::MatrixXd& adjacency,
                                     const SpectralOptions& options) {
  const int n = static_cast<int>(adjacency.rows());
  if (adjacency.cols() != n) throw std::invalid_argument("spectral: adjacency must be square");
  if (options.k < 2 || options.k > n)
    throw std::invalid_argument("spectral: k must satisfy 2 <= k <= n");
  if (adjacency.minCoeff() < 0.0)
    throw std::invalid_argument("spectral: adjacency must be nonnegative");

  const Eigen::VectorXd degree = adjacency.rowwise().sum();
  int non_isolated = 0;
  for (int i = 0; i < n; ++i)
    if (degree(i) > 0.0) ++non_isolated;
  if (options.k > non_isolated)
    throw std::invalid_argument("spectral: k exceeds the number of non-isolated vertices");

  Eigen::VectorXd dinv_sqrt(n);
  for (int i = 0; i < n; ++i)
    dinv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
  Eigen::MatrixXd lap =
      Eigen::MatrixXd::Identity(n, n) -
      dinv_sqrt.asDiagonal() * adjacency * dinv_sqrt.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("spectral: eigendecomposition failed");
  Eigen::MatrixXd embed = eig.eigenvectors().leftCols(options.k);
  for (int i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }

  std::mt19937_64 rng(options.seed);
  KmeansResult best;
  for (int r = 0; r < std::max(1, options.kmeans_restarts); ++r) {
    KmeansResult cur = kmeans_once(embed, options.k, rng);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = best.assign[i] + 1;
  return labels;
}

FitResult single_layer_vb(const Eigen::MatrixXd& layer, const WeightFamily& family,
                          int k_total, const InferenceOptions& options) {
  MultilayerGraph g;
  g.layers = {layer};
  g.families = {family};
  return run(g, 0, {k_total}, options);
}

}  // namespace mlwsbm
