#pragma once

#include <Eigen/Core>

#include <random>
#include <string>

namespace mlwsbm {

/* Conjugate hyperparameters tau for one edge-weight distribution.
 * The prior/posterior over the block parameter theta is
 *     p(theta) = exp(tau . eta(theta)) / Z(tau),
 * so tau fully determines the distribution of theta within its family.
 */
struct ConjugateParams {
  Eigen::VectorXd tau;
};

enum class FamilyKind { Bernoulli, Poisson };

/* An exponential-family edge-weight model: the sufficient statistic T,
 * natural parameter eta and conjugate log-normalizer log Z(tau).
 *
 * Both shipped families use the vector convention T(x) = (x, 1):
 *   Bernoulli: eta(theta) = (log theta/(1-theta), log(1-theta)),
 *              conjugate is Beta(tau1+1, tau2-tau1+1);
 *   Poisson:   eta(theta) = (log theta, -theta),
 *              conjugate is Gamma(shape tau1+1, rate tau2).
 *
 * Adding a family means adding an enum case and switch arms for the
 * operations below; nothing else in the library assumes a specific family.
 */
class WeightFamily {
 public:
  explicit WeightFamily(FamilyKind kind) : kind_(kind) {}

  FamilyKind kind() const { return kind_; }
  /// Length d of the sufficient-statistic vector (2 for both families).
  int stat_dim() const { return 2; }
  /// Free parameters per block (theta is scalar for both families).
  int theta_dim() const { return 1; }
  const char* name() const;
  static WeightFamily parse(const std::string& name);

  bool admissible_weight(double w) const;
  /// tau admissible iff the conjugate density is proper
  /// (Bernoulli: tau1 > -1 and tau2 - tau1 > -1; Poisson: tau1 > -1, tau2 > 0).
  bool admissible(const ConjugateParams& p) const;

  /// T(weight). Throws std::domain_error on an inadmissible weight.
  Eigen::VectorXd sufficient_statistic(double weight) const;

  /// log Z(tau) = log \int exp(tau . eta(theta)) dtheta.
  double log_partition(const ConjugateParams& p) const;

  /// etabar(tau) = grad_tau log Z(tau) = E_{q(theta)}[eta(theta)].
  Eigen::VectorXd expected_natural(const ConjugateParams& p) const;

  /// E_{q(theta)}[theta] under the conjugate density at tau.
  double posterior_mean(const ConjugateParams& p) const;

  /// One draw of theta from the conjugate density at tau.
  double sample_param(const ConjugateParams& p, std::mt19937_64& rng) const;

  /// One edge-weight draw at parameter theta. For sampling only, the closed
  /// boundary is accepted (Bernoulli theta in [0,1], Poisson theta in [0,inf)).
  double sample_weight(double theta, std::mt19937_64& rng) const;

  /// Normalized log p(weight | theta), base measure included.
  double log_density(double weight, double theta) const;

  /// Flat/weak default hyperparameters: Bernoulli (0,0), Poisson (0,0.1).
  ConjugateParams default_prior() const;

  bool operator==(const WeightFamily& other) const { return kind_ == other.kind_; }

 private:
  FamilyKind kind_;
};

namespace num {

/// Digamma via recurrence to x >= 10 plus the asymptotic series;
/// absolute error below 1e-12 on [1e-3, 1e6].
double digamma(double x);

double log_gamma(double x);
double log_beta(double a, double b);

/// SplitMix64 finalizer; used to derive independent seed streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace num

}  // namespace mlwsbm
