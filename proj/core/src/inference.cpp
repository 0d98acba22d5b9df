#include "mlwsbm/inference.hpp"

#include "mlwsbm/baselines.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mlwsbm {

namespace {

// Per-component matrices S_c with S_c(i,j) = T_c(A_ij) for i != j and a
// zero diagonal, so matrix products over them realize sums over ordered
// pairs i != j.
using StatMats = std::vector<Eigen::MatrixXd>;

StatMats stat_matrices(const Eigen::MatrixXd& a, const WeightFamily& family) {
  const int n = static_cast<int>(a.rows());
  const int d = family.stat_dim();
  StatMats s(d, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd t = family.sufficient_statistic(a(i, j));
      for (int c = 0; c < d; ++c) {
        s[c](i, j) = t(c);
        s[c](j, i) = t(c);
      }
    }
  }
  return s;
}

std::vector<StatMats> all_stat_matrices(const MultilayerGraph& g) {
  std::vector<StatMats> out;
  out.reserve(g.num_layers());
  for (int l = 0; l < g.num_layers(); ++l)
    out.push_back(stat_matrices(g.layers[l], g.families[l]));
  return out;
}

// H_c(a,b) = etabar(tau_ab)[c]; symmetric because the tau grid is.
std::vector<Eigen::MatrixXd> etabar_tables(const BlockGrid& grid, const WeightFamily& family) {
  const int k = grid.k(), d = family.stat_dim();
  std::vector<Eigen::MatrixXd> h(d, Eigen::MatrixXd(k, k));
  ConjugateParams p;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      p.tau = grid.at(a, b);
      const Eigen::VectorXd e = family.expected_natural(p);
      for (int c = 0; c < d; ++c) h[c](a, b) = e(c);
    }
  }
  return h;
}

// One tau per unordered block: every unordered dyad contributes its
// statistic once per ordering, so off-diagonal blocks accumulate both
// M(a,b) and M(b,a) with M = mu^T S mu.
void tau_kernel(VariationalState& st, const MultilayerGraph& g,
                const std::vector<StatMats>& stats) {
  for (int l = 0; l < st.num_layers(); ++l) {
    const int k = st.k_total[l];
    const int d = g.families[l].stat_dim();
    for (int c = 0; c < d; ++c) {
      const Eigen::MatrixXd m = st.mu[l].transpose() * (stats[l][c] * st.mu[l]);
      for (int a = 0; a < k; ++a) {
        st.tau[l].at(a, a)(c) = st.tau0[l](c) + m(a, a);
        for (int b = a + 1; b < k; ++b) {
          const double sum = m(a, b) + m(b, a);
          st.tau[l].at(a, b)(c) = st.tau0[l](c) + sum;
          st.tau[l].at(b, a)(c) = st.tau0[l](c) + sum;
        }
      }
    }
  }
}

// Full n x K^(l) log-score matrix of layer l at the current tau and mu:
// score(i,k) = sum_{j != i} sum_b T(A_ij) mu_jb etabar_(k,b), reduced by its
// row mean. Centering expresses every layer's evidence as within-layer
// ratios: a softmax no-op for one layer, but required when layers of
// different weight families meet in the shared average, where otherwise
// the layers' absolute log-likelihood scales (not their community signal)
// decide the shared-versus-private competition.
Eigen::MatrixXd score_matrix(const VariationalState& st, const MultilayerGraph& g,
                             const StatMats& stats_l, int l) {
  const auto h = etabar_tables(st.tau[l], g.families[l]);
  Eigen::MatrixXd score = Eigen::MatrixXd::Zero(st.n(), st.k_total[l]);
  for (size_t c = 0; c < h.size(); ++c)
    score.noalias() += (stats_l[c] * st.mu[l]) * h[c];
  score.colwise() -= score.rowwise().mean();
  return score;
}

std::vector<Eigen::MatrixXd> all_score_matrices(const VariationalState& st,
                                                const MultilayerGraph& g,
                                                const std::vector<StatMats>& stats) {
  std::vector<Eigen::MatrixXd> scores;
  scores.reserve(st.num_layers());
  for (int l = 0; l < st.num_layers(); ++l)
    scores.push_back(score_matrix(st, g, stats[l], l));
  return scores;
}

void stage_shared(VariationalState& st, const std::vector<Eigen::MatrixXd>& scores) {
  const int K = st.k_shared;
  if (K == 0) return;
  const int L = st.num_layers();
  Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(st.n(), K);
  for (int l = 0; l < L; ++l) avg += scores[l].leftCols(K);
  avg /= static_cast<double>(L);
  if (st.prior_in_mu) avg.rowwise() += st.log_mu0[0].head(K).transpose();
  for (int l = 0; l < L; ++l) st.log_scores[l].leftCols(K) = avg;
}

void stage_private(VariationalState& st, const std::vector<Eigen::MatrixXd>& scores) {
  const int K = st.k_shared;
  for (int l = 0; l < st.num_layers(); ++l) {
    const int kp = st.k_total[l] - K;
    if (kp == 0) continue;
    st.log_scores[l].rightCols(kp) = scores[l].rightCols(kp);
    if (st.prior_in_mu)
      st.log_scores[l].rightCols(kp).rowwise() += st.log_mu0[l].tail(kp).transpose();
  }
}

void refresh_staging(VariationalState& st) {
  for (int l = 0; l < st.num_layers(); ++l)
    st.log_scores[l] = st.mu[l].array().log();
}

double xlogx_gap(const Eigen::MatrixXd& mu, const Eigen::VectorXd& log_mu0, int col0) {
  // sum over rows i and columns k >= col0 of mu_ik (log mu0_k - log mu_ik)
  double total = 0.0;
  for (int k = col0; k < mu.cols(); ++k) {
    for (int i = 0; i < mu.rows(); ++i) {
      const double m = mu(i, k);
      if (m > 0.0) total += m * (log_mu0(k) - std::log(m));
    }
  }
  return total;
}

ElboTerms elbo_terms_with_stats(const VariationalState& st, const MultilayerGraph& g,
                                const std::vector<StatMats>& stats) {
  ElboTerms t;
  ConjugateParams p, p0;
  for (int l = 0; l < st.num_layers(); ++l) {
    const WeightFamily& fam = g.families[l];
    const auto h = etabar_tables(st.tau[l], fam);
    for (int c = 0; c < fam.stat_dim(); ++c) {
      const Eigen::MatrixXd m = st.mu[l].transpose() * (stats[l][c] * st.mu[l]);
      t.likelihood += 0.5 * m.cwiseProduct(h[c]).sum();
    }
    p0.tau = st.tau0[l];
    const double log_z0 = fam.log_partition(p0);
    for (int a = 0; a < st.k_total[l]; ++a) {
      for (int b = a; b < st.k_total[l]; ++b) {
        p.tau = st.tau[l].at(a, b);
        t.theta_divergence += fam.log_partition(p) - log_z0 -
                              (p.tau - st.tau0[l]).dot(fam.expected_natural(p));
      }
    }
  }
  // Shared labels are drawn once (layer 1); other layers contribute only
  // their private columns.
  t.label += xlogx_gap(st.mu[0], st.log_mu0[0], 0);
  for (int l = 1; l < st.num_layers(); ++l)
    t.label += xlogx_gap(st.mu[l], st.log_mu0[l], st.k_shared);
  return t;
}

double max_abs_diff(const std::vector<Eigen::MatrixXd>& a,
                    const std::vector<Eigen::MatrixXd>& b) {
  double d = 0.0;
  for (size_t l = 0; l < a.size(); ++l)
    d = std::max(d, (a[l] - b[l]).cwiseAbs().maxCoeff());
  return d;
}

// Greedy maximum-overlap matching of each layer's spectral labels onto
// layer 1, then a reorder placing the K best cross-layer-agreeing layer-1
// communities at indices 1..K.
std::vector<std::vector<int>> align_spectral_labels(std::vector<std::vector<int>> labels,
                                                    int k_shared,
                                                    const std::vector<int>& k_total) {
  const int L = static_cast<int>(labels.size());
  const int n = static_cast<int>(labels[0].size());
  const int k1 = k_total[0];
  std::vector<double> agreement(k1, 0.0);
  std::vector<std::vector<int>> matched_to(L);  // layer-1 id per community, 0 = none

  for (int l = 1; l < L; ++l) {
    const int kl = k_total[l];
    Eigen::MatrixXi overlap = Eigen::MatrixXi::Zero(kl, k1);
    for (int i = 0; i < n; ++i) overlap(labels[l][i] - 1, labels[0][i] - 1)++;
    std::vector<bool> a_used(kl, false), b_used(k1, false);
    matched_to[l].assign(kl + 1, 0);
    const int rounds = std::min(kl, k1);
    for (int r = 0; r < rounds; ++r) {
      int best_a = -1, best_b = -1, best = -1;
      for (int a = 0; a < kl; ++a) {
        if (a_used[a]) continue;
        for (int b = 0; b < std::min(k1, kl); ++b) {
          if (b_used[b]) continue;
          if (overlap(a, b) > best) {
            best = overlap(a, b);
            best_a = a;
            best_b = b;
          }
        }
      }
      if (best_a < 0) break;
      a_used[best_a] = true;
      b_used[best_b] = true;
      matched_to[l][best_a + 1] = best_b + 1;
      agreement[best_b] += best;
    }
  }

  // Permutation of layer-1 ids: strongest agreement first.
  std::vector<int> order(k1);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return agreement[x] > agreement[y]; });
  std::vector<int> perm1(k1 + 1, 0);
  for (int pos = 0; pos < k1; ++pos) perm1[order[pos] + 1] = pos + 1;

  std::vector<std::vector<int>> out(L, std::vector<int>(n, 0));
  for (int i = 0; i < n; ++i) out[0][i] = perm1[labels[0][i]];
  for (int l = 1; l < L; ++l) {
    const int kl = k_total[l];
    std::vector<int> final_id(kl + 1, 0);
    std::vector<bool> taken(kl + 1, false);
    for (int a = 1; a <= kl; ++a) {
      const int m = matched_to[l][a];
      if (m != 0 && perm1[m] <= k_shared) {
        final_id[a] = perm1[m];
        taken[perm1[m]] = true;
      }
    }
    int next = 1;
    for (int a = 1; a <= kl; ++a) {
      if (final_id[a] != 0) continue;
      while (next <= kl && taken[next]) ++next;
      final_id[a] = next;
      taken[next] = true;
    }
    for (int i = 0; i < n; ++i) out[l][i] = final_id[labels[l][i]];
  }
  return out;
}

struct TraceStats {
  double final_elbo = -std::numeric_limits<double>::infinity();
  double max_dip = 0.0;
};

TraceStats trace_stats(const std::vector<double>& trace) {
  TraceStats s;
  if (!trace.empty()) s.final_elbo = trace.back();
  for (size_t t = 1; t < trace.size(); ++t) {
    const double drop = trace[t - 1] - trace[t];
    if (drop > 0.0) {
      const double scale = std::max(1.0, std::abs(trace[t - 1]));
      s.max_dip = std::max(s.max_dip, drop / scale);
    }
  }
  return s;
}

}  // namespace

BlockQuadrant quadrant_of(int a, int b, int k_shared) {
  const bool as = a <= k_shared, bs = b <= k_shared;
  if (as && bs) return BlockQuadrant::SharedShared;
  if (as) return BlockQuadrant::SharedPrivate;
  if (bs) return BlockQuadrant::PrivateShared;
  return BlockQuadrant::PrivatePrivate;
}

void InferenceOptions::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("inference: tol must be positive");
  if (damping < 0.0 || damping >= 1.0)
    throw std::invalid_argument("inference: damping must lie in [0,1)");
  if (max_outer < 1 || max_inner < 1 || restarts < 1)
    throw std::invalid_argument("inference: iteration caps and restarts must be >= 1");
  if (init == InitMode::Provided && init_mu.empty())
    throw std::invalid_argument("inference: provided init requires init_mu");
}

VariationalState init_state(const MultilayerGraph& graphs, int k_shared,
                            const std::vector<int>& k_total,
                            const InferenceOptions& options, std::mt19937_64& rng) {
  const int L = graphs.num_layers();
  const int n = graphs.n();
  if (static_cast<int>(k_total.size()) != L)
    throw std::invalid_argument("inference: one K^(l) per layer required");
  for (int l = 0; l < L; ++l) {
    if (k_total[l] < 1) throw std::invalid_argument("inference: K^(l) must be >= 1");
    if (k_total[l] > n) throw std::invalid_argument("inference: K^(l) exceeds vertex count");
  }
  const int k_min = *std::min_element(k_total.begin(), k_total.end());
  if (k_shared < 0 || k_shared > k_min)
    throw std::invalid_argument("inference: K must satisfy 0 <= K <= min_l K^(l)");

  VariationalState st;
  st.k_shared = k_shared;
  st.k_total = k_total;
  st.prior_in_mu = options.prior_in_mu;
  st.seed = options.seed;

  st.tau0.resize(L);
  for (int l = 0; l < L; ++l) {
    st.tau0[l] = options.tau0.empty() ? graphs.families[l].default_prior().tau
                                      : options.tau0[l];
    ConjugateParams p{st.tau0[l]};
    if (!graphs.families[l].admissible(p))
      throw std::invalid_argument("inference: inadmissible tau0 for layer " +
                                  std::to_string(l + 1));
  }
  st.log_mu0.resize(L);
  for (int l = 0; l < L; ++l) {
    Eigen::VectorXd m = options.mu0.empty()
                            ? Eigen::VectorXd::Constant(k_total[l], 1.0 / k_total[l])
                            : options.mu0[l];
    if (m.size() != k_total[l] || m.minCoeff() < 0.0 || std::abs(m.sum() - 1.0) > 1e-9)
      throw std::invalid_argument("inference: mu0 of layer " + std::to_string(l + 1) +
                                  " must be a probability vector of length K^(l)");
    st.log_mu0[l] = m.array().log();
  }

  st.mu.resize(L);
  switch (options.init) {
    case InitMode::Provided: {
      if (static_cast<int>(options.init_mu.size()) != L)
        throw std::invalid_argument("inference: init_mu must have one matrix per layer");
      for (int l = 0; l < L; ++l) {
        Eigen::MatrixXd m = options.init_mu[l];
        if (m.rows() != n || m.cols() != k_total[l] || m.minCoeff() < 0.0)
          throw std::invalid_argument("inference: init_mu of layer " +
                                      std::to_string(l + 1) + " has wrong shape or sign");
        for (int i = 0; i < n; ++i) {
          const double s = m.row(i).sum();
          if (!(s > 0.0))
            throw std::invalid_argument("inference: init_mu has a zero row");
          m.row(i) /= s;
        }
        // Floor exact zeros so the shared-block copy below can never
        // produce an all-zero row (one-hot inits stay argmax-identical).
        const double floor_eps = 1e-8;
        m = (1.0 - floor_eps) * m +
            Eigen::MatrixXd::Constant(n, k_total[l], floor_eps / k_total[l]);
        st.mu[l] = std::move(m);
      }
      break;
    }
    case InitMode::Random: {
      std::exponential_distribution<double> expo(1.0);
      for (int l = 0; l < L; ++l) {
        st.mu[l].resize(n, k_total[l]);
        for (int i = 0; i < n; ++i) {
          double s = 0.0;
          for (int k = 0; k < k_total[l]; ++k) {
            st.mu[l](i, k) = expo(rng);
            s += st.mu[l](i, k);
          }
          st.mu[l].row(i) /= s;
        }
      }
      break;
    }
    case InitMode::Spectral: {
      std::vector<std::vector<int>> hard(L);
      for (int l = 0; l < L; ++l) {
        if (k_total[l] == 1) {
          hard[l].assign(n, 1);
          continue;
        }
        SpectralOptions so;
        so.k = k_total[l];
        so.seed = rng();
        try {
          hard[l] = spectral_clustering(graphs.layers[l], so);
        } catch (const std::invalid_argument&) {
          // Too many isolated vertices for a spectral embedding
          // (e.g. an empty graph in a BIC scan): random hard labels.
          hard[l].resize(n);
          for (int i = 0; i < n; ++i)
            hard[l][i] = 1 + static_cast<int>(rng() % k_total[l]);
        }
      }
      if (L > 1) hard = align_spectral_labels(std::move(hard), k_shared, k_total);
      const double eps = 0.1;
      for (int l = 0; l < L; ++l) {
        const int k = k_total[l];
        const double off = k > 1 ? eps / (k - 1) : 0.0;
        st.mu[l] = Eigen::MatrixXd::Constant(n, k, off);
        for (int i = 0; i < n; ++i)
          st.mu[l](i, hard[l][i] - 1) = k > 1 ? 1.0 - eps : 1.0;
      }
      break;
    }
  }

  // Enforce shared-column equality by copying layer 1's shared block.
  for (int l = 1; l < L; ++l) {
    if (k_shared > 0) st.mu[l].leftCols(k_shared) = st.mu[0].leftCols(k_shared);
    for (int i = 0; i < n; ++i) st.mu[l].row(i) /= st.mu[l].row(i).sum();
  }

  st.tau.resize(L);
  for (int l = 0; l < L; ++l) st.tau[l] = BlockGrid(k_total[l], st.tau0[l]);
  st.log_scores.resize(L);
  refresh_staging(st);
  return st;
}

void update_tau(VariationalState& state, const MultilayerGraph& graphs) {
  tau_kernel(state, graphs, all_stat_matrices(graphs));
}

void update_mu_shared(VariationalState& state, const MultilayerGraph& graphs) {
  stage_shared(state, all_score_matrices(state, graphs, all_stat_matrices(graphs)));
}

void update_mu_private(VariationalState& state, const MultilayerGraph& graphs) {
  stage_private(state, all_score_matrices(state, graphs, all_stat_matrices(graphs)));
}

void normalize_mu(VariationalState& state) {
  for (int l = 0; l < state.num_layers(); ++l) {
    Eigen::MatrixXd& ls = state.log_scores[l];
    for (int i = 0; i < ls.rows(); ++i) {
      const double m = ls.row(i).maxCoeff();
      if (!std::isfinite(m))
        throw std::domain_error("normalize_mu: degenerate row of log-scores");
      Eigen::ArrayXd e = (ls.row(i).array() - m).exp();
      state.mu[l].row(i) = (e / e.sum()).matrix();
    }
  }
  refresh_staging(state);
}

ElboTerms elbo_terms(const VariationalState& state, const MultilayerGraph& graphs) {
  return elbo_terms_with_stats(state, graphs, all_stat_matrices(graphs));
}

double elbo(const VariationalState& state, const MultilayerGraph& graphs) {
  return elbo_terms(state, graphs).total();
}

MapResult map_labels(const VariationalState& state) {
  MapResult r;
  const int L = state.num_layers(), n = state.n();
  r.labels.labels.assign(L, std::vector<int>(n, 0));
  for (int l = 0; l < L; ++l) {
    for (int i = 0; i < n; ++i) {
      int best = 0;
      for (int k = 1; k < state.k_total[l]; ++k)
        if (state.mu[l](i, k) > state.mu[l](i, best)) best = k;
      r.labels.labels[l][i] = best + 1;
    }
  }
  r.shared.resize(n);
  for (int i = 0; i < n; ++i) r.shared[i] = r.labels.labels[0][i] <= state.k_shared;
  return r;
}

FitResult run(const MultilayerGraph& graphs, int k_shared, std::vector<int> k_total,
              const InferenceOptions& options) {
  options.validate();
  graphs.validate();
  const auto stats = all_stat_matrices(graphs);

  const int restarts = options.init == InitMode::Provided ? 1 : options.restarts;
  FitResult best;
  TraceStats best_stats;

  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(num::mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    InferenceOptions o = options;
    if (options.init == InitMode::Spectral && r > 0) o.init = InitMode::Random;
    VariationalState st = init_state(graphs, k_shared, k_total, o, rng);
    st.seed = options.seed;

    st.elbo_trace.push_back(elbo_terms_with_stats(st, graphs, stats).total());
    bool converged = false;
    for (int outer = 0; outer < options.max_outer && !converged; ++outer) {
      tau_kernel(st, graphs, stats);
      const std::vector<Eigen::MatrixXd> mu_at_sweep_start = st.mu;
      for (int inner = 0; inner < options.max_inner; ++inner) {
        const std::vector<Eigen::MatrixXd> mu_prev = st.mu;
        const auto scores = all_score_matrices(st, graphs, stats);
        stage_shared(st, scores);
        stage_private(st, scores);
        normalize_mu(st);
        if (options.damping > 0.0) {
          for (int l = 0; l < st.num_layers(); ++l)
            st.mu[l] = (1.0 - options.damping) * st.mu[l] + options.damping * mu_prev[l];
          refresh_staging(st);
        }
        if (max_abs_diff(st.mu, mu_prev) < options.tol) break;
      }
      st.elbo_trace.push_back(elbo_terms_with_stats(st, graphs, stats).total());
      converged = max_abs_diff(st.mu, mu_at_sweep_start) < options.tol;
    }
    st.converged = converged;

    const TraceStats ts = trace_stats(st.elbo_trace);
    if (r == 0 || ts.final_elbo > best_stats.final_elbo) {
      best_stats = ts;
      best.state = std::move(st);
    }
  }

  MapResult m = map_labels(best.state);
  best.labels = std::move(m.labels);
  best.shared = std::move(m.shared);
  best.converged = best.state.converged;
  best.max_elbo_dip = best_stats.max_dip;
  return best;
}

std::string fit_to_json(const FitResult& fit) {
  nlohmann::json j;
  const VariationalState& st = fit.state;
  j["k_shared"] = st.k_shared;
  j["k_total"] = st.k_total;
  j["converged"] = fit.converged;
  j["seed"] = st.seed;
  j["elbo_trace"] = st.elbo_trace;
  j["max_elbo_dip"] = fit.max_elbo_dip;
  j["labels"] = fit.labels.labels;
  std::vector<bool> shared(fit.shared.begin(), fit.shared.end());
  j["shared"] = shared;
  for (int l = 0; l < st.num_layers(); ++l) {
    nlohmann::json jm;
    jm["rows"] = st.mu[l].rows();
    jm["cols"] = st.mu[l].cols();
    std::vector<double> data;
    data.reserve(st.mu[l].size());
    for (int i = 0; i < st.mu[l].rows(); ++i)
      for (int k = 0; k < st.mu[l].cols(); ++k) data.push_back(st.mu[l](i, k));
    jm["data"] = std::move(data);
    j["mu"].push_back(std::move(jm));

    nlohmann::json jt = nlohmann::json::array();
    for (int a = 0; a < st.k_total[l]; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (int b = 0; b < st.k_total[l]; ++b) {
        const Eigen::VectorXd& tau = st.tau[l].at(a, b);
        row.push_back(std::vector<double>(tau.data(), tau.data() + tau.size()));
      }
      jt.push_back(std::move(row));
    }
    j["tau"].push_back(std::move(jt));
  }
  return j.dump(2);
}

}  // namespace mlwsbm
