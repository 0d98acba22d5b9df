#include "mlwsbm/exponfam.hpp"

#include <cmath>
#include <stdexcept>

namespace mlwsbm {

namespace num {

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double result = 0.0;
  while (x < 10.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli-number coefficients through x^-14.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  result += std::log(x) - 0.5 * inv;
  result -= inv2 * (1.0 / 12.0 +
                    inv2 * (-1.0 / 120.0 +
                            inv2 * (1.0 / 252.0 +
                                    inv2 * (-1.0 / 240.0 +
                                            inv2 * (1.0 / 132.0 +
                                                    inv2 * (-691.0 / 32760.0 +
                                                            inv2 * (1.0 / 12.0)))))));
  return result;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace num

namespace {

bool is_integer(double w) { return std::floor(w) == w; }

[[noreturn]] void bad_tau(const char* family) {
  throw std::domain_error(std::string("inadmissible tau for ") + family + " family");
}

double sample_gamma(double shape, double rate, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

}  // namespace

const char* WeightFamily::name() const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return "bernoulli";
    case FamilyKind::Poisson: return "poisson";
  }
  throw std::logic_error("unreachable");
}

WeightFamily WeightFamily::parse(const std::string& name) {
  if (name == "bernoulli") return WeightFamily(FamilyKind::Bernoulli);
  if (name == "poisson") return WeightFamily(FamilyKind::Poisson);
  throw std::invalid_argument("unknown weight family: " + name);
}

bool WeightFamily::admissible_weight(double w) const {
  switch (kind_) {
    case FamilyKind::Bernoulli: return w == 0.0 || w == 1.0;
    case FamilyKind::Poisson: return w >= 0.0 && is_integer(w) && std::isfinite(w);
  }
  return false;
}

bool WeightFamily::admissible(const ConjugateParams& p) const {
  if (p.tau.size() != stat_dim()) return false;
  const double t1 = p.tau(0), t2 = p.tau(1);
  switch (kind_) {
    case FamilyKind::Bernoulli: return t1 > -1.0 && t2 - t1 > -1.0;
    case FamilyKind::Poisson: return t1 > -1.0 && t2 > 0.0;
  }
  return false;
}

Eigen::VectorXd WeightFamily::sufficient_statistic(double weight) const {
  if (!admissible_weight(weight))
    throw std::domain_error(std::string("weight ") + std::to_string(weight) +
                            " not admissible for " + name() + " family");
  Eigen::VectorXd t(2);
  t << weight, 1.0;
  return t;
}

double WeightFamily::log_partition(const ConjugateParams& p) const {
  if (!admissible(p)) bad_tau(name());
  const double t1 = p.tau(0), t2 = p.tau(1);
  switch (kind_) {
    case FamilyKind::Bernoulli:
      return num::log_beta(t1 + 1.0, t2 - t1 + 1.0);
    case FamilyKind::Poisson:
      return num::log_gamma(t1 + 1.0) - (t1 + 1.0) * std::log(t2);
  }
  throw std::logic_error("unreachable");
}

Eigen::VectorXd WeightFamily::expected_natural(const ConjugateParams& p) const {
  if (!admissible(p)) bad_tau(name());
  const double t1 = p.tau(0), t2 = p.tau(1);
  Eigen::VectorXd e(2);
  switch (kind_) {
    case FamilyKind::Bernoulli: {
      const double a = num::digamma(t1 + 1.0);
      const double b = num::digamma(t2 - t1 + 1.0);
      e << a - b, b - num::digamma(t2 + 2.0);
      return e;
    }
    case FamilyKind::Poisson:
      e << num::digamma(t1 + 1.0) - std::log(t2), -(t1 + 1.0) / t2;
      return e;
  }
  throw std::logic_error("unreachable");
}

double WeightFamily::posterior_mean(const ConjugateParams& p) const {
  if (!admissible(p)) bad_tau(name());
  const double t1 = p.tau(0), t2 = p.tau(1);
  switch (kind_) {
    case FamilyKind::Bernoulli: return (t1 + 1.0) / (t2 + 2.0);
    case FamilyKind::Poisson: return (t1 + 1.0) / t2;
  }
  throw std::logic_error("unreachable");
}

double WeightFamily::sample_param(const ConjugateParams& p, std::mt19937_64& rng) const {
  if (!admissible(p)) bad_tau(name());
  const double t1 = p.tau(0), t2 = p.tau(1);
  switch (kind_) {
    case FamilyKind::Bernoulli: {
      const double x = sample_gamma(t1 + 1.0, 1.0, rng);
      const double y = sample_gamma(t2 - t1 + 1.0, 1.0, rng);
      return x / (x + y);
    }
    case FamilyKind::Poisson:
      return sample_gamma(t1 + 1.0, t2, rng);
  }
  throw std::logic_error("unreachable");
}

double WeightFamily::sample_weight(double theta, std::mt19937_64& rng) const {
  switch (kind_) {
    case FamilyKind::Bernoulli: {
      if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("Bernoulli parameter outside [0,1]");
      std::bernoulli_distribution d(theta);
      return d(rng) ? 1.0 : 0.0;
    }
    case FamilyKind::Poisson: {
      if (!(theta >= 0.0) || !std::isfinite(theta))
        throw std::domain_error("Poisson rate must be nonnegative");
      if (theta == 0.0) return 0.0;
      std::poisson_distribution<long> d(theta);
      return static_cast<double>(d(rng));
    }
  }
  throw std::logic_error("unreachable");
}

double WeightFamily::log_density(double weight, double theta) const {
  if (!admissible_weight(weight))
    throw std::domain_error(std::string("weight not admissible for ") + name());
  switch (kind_) {
    case FamilyKind::Bernoulli:
      if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("Bernoulli parameter outside (0,1)");
      return weight * std::log(theta) + (1.0 - weight) * std::log1p(-theta);
    case FamilyKind::Poisson:
      if (!(theta > 0.0)) throw std::domain_error("Poisson rate must be positive");
      return weight * std::log(theta) - theta - num::log_gamma(weight + 1.0);
  }
  throw std::logic_error("unreachable");
}

ConjugateParams WeightFamily::default_prior() const {
  ConjugateParams p;
  p.tau.resize(2);
  switch (kind_) {
    case FamilyKind::Bernoulli: p.tau << 0.0, 0.0; break;
    case FamilyKind::Poisson: p.tau << 0.0, 0.1; break;
  }
  return p;
}

}  // namespace mlwsbm
