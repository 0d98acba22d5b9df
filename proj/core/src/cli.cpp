#include "mlwsbm/cli.hpp"

#include "mlwsbm/baselines.hpp"
#include "mlwsbm/experiment.hpp"
#include "mlwsbm/io.hpp"
#include "mlwsbm/selection.hpp"
#include "mlwsbm/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace mlwsbm {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", flags.config_path, "experiment config file");
  if (needs_config) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--out", flags.out_dir, "override the output directory");
  cmd->add_option("--threads", flags.threads, "worker threads for replicates/scan points");
  cmd->add_flag("--verbose", flags.verbose, "diagnostic output on stderr");
}

ExperimentSpec resolve_spec(const CommonFlags& flags) {
  ExperimentSpec spec = load_experiment_config(flags.config_path);
  if (flags.seed) spec.seed = *flags.seed;
  if (flags.out_dir) spec.output_dir = *flags.out_dir;
  if (flags.threads) spec.threads = *flags.threads;
  spec.validate();
  return spec;
}

std::string prepare_out_dir(const ExperimentSpec& spec) {
  fs::create_directories(spec.output_dir);
  return spec.output_dir;
}

// The manifest embeds the fully resolved spec; rerunning with the emitted
// resolved.cfg reproduces every result file byte for byte.
void write_manifest(const ExperimentSpec& spec, const std::string& command,
                    const std::vector<std::string>& outputs,
                    const nlohmann::json& extras = nlohmann::json::object()) {
  const std::string resolved = spec.to_config_text();
  write_text_file(spec.output_dir + "/resolved.cfg", resolved);
  nlohmann::json j;
  j["command"] = command;
  j["seed"] = spec.seed;
  j["config"] = resolved;
  j["outputs"] = outputs;
  j["format_version"] = 1;
  for (const auto& [key, value] : extras.items()) j[key] = value;
  write_text_file(spec.output_dir + "/manifest.json", j.dump(2) + "\n");
}

int cmd_generate(const CommonFlags& flags, std::ostream& err) {
  ExperimentSpec spec = resolve_spec(flags);
  const GeneratorConfig config = spec.generator_config();
  std::mt19937_64 rng(num::mix_seed(spec.seed, 0));
  const CommunityStructure truth = sample_labels(config, rng);
  const MultilayerGraph graph = sample_graph(config, truth, rng);

  const std::string dir = prepare_out_dir(spec);
  std::vector<std::string> outputs;
  for (int l = 0; l < graph.num_layers(); ++l) {
    const std::string layer_file = "layer_" + std::to_string(l + 1) + ".csv";
    const std::string truth_file = "truth_layer" + std::to_string(l + 1) + ".labels";
    write_dense_csv(dir + "/" + layer_file, graph.layers[l]);
    write_labels(dir + "/" + truth_file, truth.labels[l]);
    outputs.push_back(layer_file);
    outputs.push_back(truth_file);
  }
  write_manifest(spec, "generate", outputs);
  if (flags.verbose)
    err << "generated " << graph.num_layers() << " layers with n=" << config.n << "\n";
  return 0;
}

int cmd_fit(const CommonFlags& flags, std::ostream& err) {
  ExperimentSpec spec = resolve_spec(flags);
  if (spec.mode != RunMode::RealFit)
    throw std::invalid_argument("fit requires a real_fit config");
  const MultilayerGraph graph = load_inputs(spec, flags.verbose ? &err : nullptr);

  InferenceOptions opt = spec.inference;
  opt.seed = spec.seed;
  const FitResult fit = run(graph, spec.fit_k_shared, spec.fit_k_total, opt);

  const std::string dir = prepare_out_dir(spec);
  std::vector<std::string> outputs = {"fit.json"};
  write_text_file(dir + "/fit.json", fit_to_json(fit) + "\n");
  for (int l = 0; l < graph.num_layers(); ++l) {
    const std::string name = "labels_layer" + std::to_string(l + 1) + ".labels";
    write_labels(dir + "/" + name, fit.labels.labels[l]);
    outputs.push_back(name);
  }
  nlohmann::json extras;
  extras["max_elbo_dip"] = fit.max_elbo_dip;
  write_manifest(spec, "fit", outputs, extras);
  if (flags.verbose)
    err << "fit " << (fit.converged ? "converged" : "did not converge") << ", final ELBO "
        << fit.state.elbo_trace.back() << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags, std::ostream& err) {
  ExperimentSpec spec = resolve_spec(flags);
  const SweepResults results = run_sweep(spec, flags.verbose ? &err : nullptr);
  const std::string dir = prepare_out_dir(spec);
  write_text_file(dir + "/results.csv", sweep_csv(results, spec.sweep_parameter));
  write_text_file(dir + "/nmi_detail.csv", sweep_detail_csv(results, spec.sweep_parameter));
  nlohmann::json extras;
  extras["max_elbo_dip"] = results.max_elbo_dip;
  extras["failed_replicates"] = results.failed_replicates;
  write_manifest(spec, "sweep", {"results.csv", "nmi_detail.csv"}, extras);
  if (results.failed_replicates > 0)
    err << results.failed_replicates << " replicate(s) failed; see diagnostics\n";
  return 0;
}

int cmd_select(const CommonFlags& flags, std::ostream& err) {
  ExperimentSpec spec = resolve_spec(flags);
  if (spec.mode != RunMode::Select)
    throw std::invalid_argument("select requires a select config");
  const MultilayerGraph graph = load_inputs(spec, flags.verbose ? &err : nullptr);
  std::vector<int> k_range;
  for (int k = spec.select_k_total_min; k <= spec.select_k_total_max; ++k)
    k_range.push_back(k);
  InferenceOptions opt = spec.inference;
  opt.seed = spec.seed;
  const SelectionReport report = select_pipeline(graph, k_range, opt, spec.threads);
  const std::string dir = prepare_out_dir(spec);
  write_text_file(dir + "/selection.json", selection_report_to_json(report) + "\n");
  nlohmann::json extras;
  extras["max_elbo_dip"] = report.max_elbo_dip;
  write_manifest(spec, "select", {"selection.json"}, extras);
  if (flags.verbose) {
    err << "selected K^(l) =";
    for (int k : report.per_layer_k) err << " " << k;
    err << ", shared K = " << report.shared_k << "\n";
  }
  return 0;
}

struct ScoreFlags {
  std::string truth_path, pred_path, graph_path;
  std::string format = "dense_csv";
  std::string family = "bernoulli";
  std::optional<int> n;
};

int cmd_score(const ScoreFlags& flags, std::ostream& out) {
  const std::vector<int> truth = read_labels(flags.truth_path);
  const std::vector<int> pred = read_labels(flags.pred_path);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", nmi(truth, pred));
  out << "nmi=" << buf << "\n";
  if (!flags.graph_path.empty()) {
    const AdjacencyFormat format = flags.format == "edge_list_tsv"
                                       ? AdjacencyFormat::EdgeListTsv
                                       : AdjacencyFormat::DenseCsv;
    const Eigen::MatrixXd a = load_adjacency(flags.graph_path, format, flags.n);
    std::snprintf(buf, sizeof(buf), "%.6f", modularity(a, pred));
    out << "modularity=" << buf << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"joint multilayer weighted stochastic block models"};
  app.require_subcommand(1);

  CommonFlags generate_flags, fit_flags, sweep_flags, select_flags;
  ScoreFlags score_flags;

  CLI::App* generate = app.add_subcommand("generate", "sample a planted multilayer graph");
  add_common(generate, generate_flags);
  CLI::App* fit = app.add_subcommand("fit", "joint VB fit on provided layers");
  add_common(fit, fit_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "synthetic benchmark sweep");
  add_common(sweep, sweep_flags);
  CLI::App* select = app.add_subcommand("select", "two-stage model selection");
  add_common(select, select_flags);

  CLI::App* score = app.add_subcommand("score", "compare label files");
  score->add_option("--truth", score_flags.truth_path, "reference labels")->required();
  score->add_option("--pred", score_flags.pred_path, "predicted labels")->required();
  score->add_option("--graph", score_flags.graph_path, "adjacency for modularity");
  score->add_option("--format", score_flags.format, "graph format");
  score->add_option("--family", score_flags.family, "graph weight family");
  score->add_option("--n", score_flags.n, "vertex count for edge lists");

  std::vector<char*> argv;
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "mlwsbm");
  argv.reserve(storage.size());
  for (std::string& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (generate->parsed()) return cmd_generate(generate_flags, err);
    if (fit->parsed()) return cmd_fit(fit_flags, err);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, err);
    if (select->parsed()) return cmd_select(select_flags, err);
    if (score->parsed()) return cmd_score(score_flags, out);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace mlwsbm
