#pragma once

#include "mlwsbm/generator.hpp"
#include "mlwsbm/inference.hpp"
#include "mlwsbm/io.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mlwsbm {

enum class RunMode { SyntheticSweep, RealFit, Select, Generate };
enum class Method { JointVb, SingleVb, Spectral };

const char* method_name(Method m);

struct InputSpec {
  std::vector<std::string> paths;  // several only for counts_round
  AdjacencyFormat format = AdjacencyFormat::DenseCsv;
  WeightFamily family{FamilyKind::Bernoulli};
  enum class Preprocess { None, CorrelationMean, CorrelationValue, CountsRound };
  Preprocess preprocess = Preprocess::None;
  double threshold_value = 0.0;
  std::optional<int> n;  // vertex count for edge lists
};

/* Declarative description of a run, parsed from the key-value config
 * format documented in docs/FORMATS.md.
 */
struct ExperimentSpec {
  RunMode mode = RunMode::SyntheticSweep;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_dir = ".";

  // Synthetic generator (synthetic_sweep and generate modes).
  int gen_n = 0;
  int gen_layers = 0;
  int gen_k_shared = 0;
  std::vector<int> gen_k_total;
  std::vector<WeightFamily> gen_families;
  double gen_p = 0.0;
  double gen_q = 0.0;
  std::map<int, double> gen_q_override;  // 1-based layer -> q
  LabelMode gen_label_mode = LabelMode::Multinomial;
  std::map<int, Eigen::VectorXd> gen_mu0;  // 1-based layer -> mu0

  // Sweep.
  std::string sweep_parameter = "q_prime";
  std::vector<double> sweep_values;
  int sweep_replicates = 1;
  int sweep_target_layer = 2;
  std::vector<Method> methods;

  InferenceOptions inference;

  // Real data (real_fit and select modes).
  std::vector<InputSpec> inputs;
  int fit_k_shared = 0;
  std::vector<int> fit_k_total;
  int select_k_total_min = 2;
  int select_k_total_max = 8;

  /// Planted-theta generator config (theta = (p - q_l) I + q_l 11^T).
  GeneratorConfig generator_config() const;

  /// Canonical resolved config text; parsing it reproduces this spec.
  std::string to_config_text() const;

  void validate() const;
};

ExperimentSpec parse_experiment_config(const std::string& text);
ExperimentSpec load_experiment_config(const std::string& path);

/// Load, preprocess and validate the declared input layers.
MultilayerGraph load_inputs(const ExperimentSpec& spec, std::ostream* warnings = nullptr);

}  // namespace mlwsbm
