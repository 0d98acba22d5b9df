#pragma once

// Independent oracles for the test suites: numerical quadrature, finite
// differences, naive-loop update formulas and exhaustive-enumeration
// evidence. Everything here is deliberately written the slow, literal way
// and must stay independent of the library implementation it checks.

#include "mlwsbm/exponfam.hpp"
#include "mlwsbm/generator.hpp"
#include "mlwsbm/inference.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------
// Adaptive Simpson quadrature.

inline double simpson_segment(const std::function<double(double)>& f, double a, double b,
                              double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double fa, double fm, double fb, double whole, double tol,
                               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_segment(f, a, m, fa, flm, fm);
  const double right = simpson_segment(f, m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Composite panels before adaptive refinement, so narrow peaks inside a
// long interval are not missed by the initial probe.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
  const int panels = 128;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h, hi = lo + h;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    total += adaptive_simpson(f, lo, hi, fa, fm, fb, simpson_segment(f, lo, hi, fa, fm, fb),
                              tol / panels, 30);
  }
  return total;
}

// Mass of the conjugate density exp(tau . eta(theta) - log Z) over the
// parameter space.
inline double conjugate_mass(const mlwsbm::WeightFamily& fam,
                             const mlwsbm::ConjugateParams& p) {
  const double log_z = fam.log_partition(p);
  const double t1 = p.tau(0), t2 = p.tau(1);
  if (fam.kind() == mlwsbm::FamilyKind::Bernoulli) {
    auto f = [&](double th) {
      if (th <= 0.0 || th >= 1.0) {
        // Limit values for exponents >= 0 (shapes >= 1).
        return (th <= 0.0 ? (t1 == 0.0 ? std::exp(-log_z) : 0.0)
                          : (t2 - t1 == 0.0 ? std::exp(-log_z) : 0.0));
      }
      return std::exp(t1 * std::log(th) + (t2 - t1) * std::log1p(-th) - log_z);
    };
    return integrate(f, 0.0, 1.0, 1e-10);
  }
  const double shape = t1 + 1.0, rate = t2;
  const double upper = (shape + 60.0 * std::sqrt(shape) + 60.0) / rate;
  auto f = [&](double th) {
    if (th <= 0.0) return t1 == 0.0 ? std::exp(-log_z) : 0.0;
    return std::exp(t1 * std::log(th) - rate * th - log_z);
  };
  return integrate(f, 0.0, upper, 1e-10);
}

// Posterior expectation of g(theta) under the conjugate density.
inline double conjugate_expectation(const mlwsbm::WeightFamily& fam,
                                    const mlwsbm::ConjugateParams& p,
                                    const std::function<double(double)>& g) {
  const double log_z = fam.log_partition(p);
  const double t1 = p.tau(0), t2 = p.tau(1);
  if (fam.kind() == mlwsbm::FamilyKind::Bernoulli) {
    auto f = [&](double th) {
      if (th <= 0.0 || th >= 1.0) return 0.0;
      return g(th) * std::exp(t1 * std::log(th) + (t2 - t1) * std::log1p(-th) - log_z);
    };
    return integrate(f, 1e-12, 1.0 - 1e-12, 1e-11);
  }
  const double shape = t1 + 1.0, rate = t2;
  const double upper = (shape + 60.0 * std::sqrt(shape) + 60.0) / rate;
  auto f = [&](double th) {
    if (th <= 0.0) return 0.0;
    return g(th) * std::exp(t1 * std::log(th) - rate * th - log_z);
  };
  return integrate(f, 1e-14, upper, 1e-11);
}

// Central finite differences of log_partition.
inline Eigen::VectorXd finite_difference_gradient(const mlwsbm::WeightFamily& fam,
                                                  const mlwsbm::ConjugateParams& p,
                                                  double step = 1e-5) {
  Eigen::VectorXd grad(p.tau.size());
  for (int c = 0; c < p.tau.size(); ++c) {
    mlwsbm::ConjugateParams hi = p, lo = p;
    hi.tau(c) += step;
    lo.tau(c) -= step;
    grad(c) = (fam.log_partition(hi) - fam.log_partition(lo)) / (2.0 * step);
  }
  return grad;
}

// ---------------------------------------------------------------------
// Naive-loop oracles for the variational updates, written straight from
// the update formulas with scalar triple loops.

// One tau per unordered block, every unordered dyad counted once per
// ordering: tau_{ab} = tau0 + sum over ordered pairs i != j of
// T(A_ij) mu_ia mu_jb, plus the mirrored sum when a != b.
inline Eigen::VectorXd naive_tau_block(const Eigen::MatrixXd& a,
                                       const mlwsbm::WeightFamily& fam,
                                       const Eigen::MatrixXd& mu,
                                       const Eigen::VectorXd& tau0, int block_a,
                                       int block_b) {
  Eigen::VectorXd tau = tau0;
  const int n = static_cast<int>(a.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      tau += fam.sufficient_statistic(a(i, j)) * mu(i, block_a) * mu(j, block_b);
      if (block_a != block_b)
        tau += fam.sufficient_statistic(a(i, j)) * mu(i, block_b) * mu(j, block_a);
    }
  return tau;
}

// Log-score row of one layer for one vertex, reduced by its mean:
// score(k) = sum_{j != i} sum_b T(A_ij) mu_jb etabar_(k,b), minus the mean
// over k. Each layer contributes within-layer evidence ratios, matching
// the library's documented convention for combining layers.
inline Eigen::VectorXd naive_score_row(const Eigen::MatrixXd& a,
                                       const mlwsbm::WeightFamily& fam,
                                       const Eigen::MatrixXd& mu,
                                       const mlwsbm::BlockGrid& tau, int vertex) {
  const int n = static_cast<int>(a.rows());
  const int k = static_cast<int>(mu.cols());
  Eigen::VectorXd score = Eigen::VectorXd::Zero(k);
  for (int community = 0; community < k; ++community) {
    for (int j = 0; j < n; ++j) {
      if (j == vertex) continue;
      const Eigen::VectorXd t = fam.sufficient_statistic(a(vertex, j));
      for (int b = 0; b < k; ++b) {
        const Eigen::VectorXd etabar =
            fam.expected_natural(mlwsbm::ConjugateParams{tau.at(community, b)});
        score(community) += t.dot(etabar) * mu(j, b);
      }
    }
  }
  return score.array() - score.mean();
}

// Shared log-score (1/L average across layers) for vertex i, community k.
inline double naive_shared_score(const mlwsbm::MultilayerGraph& g,
                                 const mlwsbm::VariationalState& st, int vertex,
                                 int community) {
  double total = 0.0;
  for (int l = 0; l < g.num_layers(); ++l)
    total +=
        naive_score_row(g.layers[l], g.families[l], st.mu[l], st.tau[l], vertex)(community);
  return total / g.num_layers();
}

// ---------------------------------------------------------------------
// Exact evidence of a single-layer model by exhaustive label enumeration:
//   sum_g prod_i mu0(g_i) prod_{a <= b} Z(tau_ab(g)) / Z(tau0)
// with hard-count tau over unordered vertex pairs i < j.
inline double exact_log_evidence(const Eigen::MatrixXd& a, const mlwsbm::WeightFamily& fam,
                                 int k, const Eigen::VectorXd& mu0,
                                 const Eigen::VectorXd& tau0) {
  const int n = static_cast<int>(a.rows());
  const double log_z0 = fam.log_partition(mlwsbm::ConjugateParams{tau0});
  std::vector<int> g(n, 0);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (;;) {
    std::vector<std::vector<Eigen::VectorXd>> tau(k,
                                                  std::vector<Eigen::VectorXd>(k, tau0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const int lo = std::min(g[i], g[j]), hi = std::max(g[i], g[j]);
        tau[lo][hi] += fam.sufficient_statistic(a(i, j));
      }
    double log_term = 0.0;
    for (int i = 0; i < n; ++i) log_term += std::log(mu0(g[i]));
    for (int x = 0; x < k; ++x)
      for (int y = x; y < k; ++y)
        log_term += fam.log_partition(mlwsbm::ConjugateParams{tau[x][y]}) - log_z0;
    terms.push_back(log_term);
    max_term = std::max(max_term, log_term);

    int pos = n - 1;
    while (pos >= 0 && g[pos] == k - 1) g[pos--] = 0;
    if (pos < 0) break;
    g[pos]++;
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

}  // namespace oracles
