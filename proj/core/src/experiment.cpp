#include "mlwsbm/experiment.hpp"

#include "mlwsbm/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mlwsbm {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Raw key-value view of a config with consumed-key tracking, so unknown
// keys can be reported.
class ConfigMap {
 public:
  explicit ConfigMap(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
      ++line_no;
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (values_.count(key))
        throw std::invalid_argument("config: duplicate key " + key);
      values_[key] = trim(line.substr(eq + 1));
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = take(key);
    if (!v) throw std::invalid_argument("config: missing required key " + key);
    return *v;
  }

  // Keys of the form prefix.<i>.suffix or prefix.<i>.
  std::vector<int> indices_with_prefix(const std::string& prefix) const {
    std::vector<int> out;
    for (const auto& [key, value] : values_) {
      if (key.rfind(prefix + ".", 0) != 0) continue;
      const std::string rest = key.substr(prefix.size() + 1);
      const size_t dot = rest.find('.');
      const std::string idx = dot == std::string::npos ? rest : rest.substr(0, dot);
      try {
        const int i = std::stoi(idx);
        if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
      } catch (const std::exception&) {
        // Not an indexed key; reported as unknown later if never consumed.
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : values_)
      if (!consumed_.count(key))
        throw std::invalid_argument("config: unknown key " + key);
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

double to_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key " + key + " is not a number: " + v);
  }
}

int to_int(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key " + key + " is not an integer: " + v);
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw std::invalid_argument("config: key " + key + " must be true or false");
}

std::vector<int> to_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (const std::string& s : split_list(v)) out.push_back(to_int(s, key));
  return out;
}

std::vector<double> to_double_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const std::string& s : split_list(v)) out.push_back(to_double(s, key));
  return out;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::JointVb: return "joint_vb";
    case Method::SingleVb: return "single_vb";
    case Method::Spectral: return "spectral";
  }
  throw std::logic_error("unreachable");
}

GeneratorConfig ExperimentSpec::generator_config() const {
  GeneratorConfig g;
  g.n = gen_n;
  g.num_layers = gen_layers;
  g.k_shared = gen_k_shared;
  g.k_total = gen_k_total;
  g.families = gen_families;
  g.label_mode = gen_label_mode;
  g.mu0.resize(gen_layers);
  for (const auto& [layer, mu] : gen_mu0) g.mu0[layer - 1] = mu;
  for (int l = 0; l < gen_layers; ++l) {
    const auto it = gen_q_override.find(l + 1);
    const double q = it == gen_q_override.end() ? gen_q : it->second;
    g.theta.push_back(planted_theta(gen_p, q, gen_k_total[l]));
  }
  return g;
}

void ExperimentSpec::validate() const {
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  inference.validate();
  const bool synthetic = mode == RunMode::SyntheticSweep || mode == RunMode::Generate;
  if (synthetic) {
    generator_config().validate();
    if (mode == RunMode::SyntheticSweep) {
      if (sweep_parameter != "q_prime")
        throw std::invalid_argument("config: only the q_prime sweep parameter is supported");
      if (sweep_values.empty()) throw std::invalid_argument("config: empty sweep grid");
      if (sweep_replicates < 1)
        throw std::invalid_argument("config: sweep replicates must be >= 1");
      if (sweep_target_layer < 1 || sweep_target_layer > gen_layers)
        throw std::invalid_argument("config: sweep target layer out of range");
      if (methods.empty()) throw std::invalid_argument("config: no methods selected");
    }
  } else {
    if (inputs.empty()) throw std::invalid_argument("config: no inputs declared");
    if (mode == RunMode::RealFit) {
      if (fit_k_total.size() != inputs.size())
        throw std::invalid_argument("config: fit.k_total needs one entry per input");
      const int k_min = *std::min_element(fit_k_total.begin(), fit_k_total.end());
      if (fit_k_shared < 0 || fit_k_shared > k_min)
        throw std::invalid_argument("config: fit.k_shared must lie in [0, min K^(l)]");
    } else {
      if (select_k_total_min < 1 || select_k_total_max < select_k_total_min)
        throw std::invalid_argument("config: invalid select.k_total range");
    }
  }
}

ExperimentSpec parse_experiment_config(const std::string& text) {
  ConfigMap cfg(text);
  ExperimentSpec s;

  const std::string mode = cfg.require("mode");
  if (mode == "synthetic_sweep") s.mode = RunMode::SyntheticSweep;
  else if (mode == "real_fit") s.mode = RunMode::RealFit;
  else if (mode == "select") s.mode = RunMode::Select;
  else if (mode == "generate") s.mode = RunMode::Generate;
  else throw std::invalid_argument("config: unknown mode " + mode);

  if (auto v = cfg.take("seed")) s.seed = std::stoull(*v);
  if (auto v = cfg.take("threads")) s.threads = to_int(*v, "threads");
  if (auto v = cfg.take("output.dir")) s.output_dir = *v;

  if (s.mode == RunMode::SyntheticSweep || s.mode == RunMode::Generate) {
    s.gen_n = to_int(cfg.require("generator.n"), "generator.n");
    s.gen_layers = to_int(cfg.require("generator.layers"), "generator.layers");
    s.gen_k_shared = to_int(cfg.require("generator.k_shared"), "generator.k_shared");
    s.gen_k_total = to_int_list(cfg.require("generator.k_total"), "generator.k_total");
    for (const std::string& f : split_list(cfg.require("generator.families")))
      s.gen_families.push_back(WeightFamily::parse(f));
    s.gen_p = to_double(cfg.require("generator.p"), "generator.p");
    s.gen_q = to_double(cfg.require("generator.q"), "generator.q");
    for (int l = 1; l <= s.gen_layers; ++l) {
      const std::string qk = "generator.q." + std::to_string(l);
      if (auto v = cfg.take(qk)) s.gen_q_override[l] = to_double(*v, qk);
      const std::string mk = "generator.mu0." + std::to_string(l);
      if (auto v = cfg.take(mk)) {
        const std::vector<double> vals = to_double_list(*v, mk);
        s.gen_mu0[l] = Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size());
      }
    }
    if (auto v = cfg.take("generator.labels")) {
      if (*v == "multinomial") s.gen_label_mode = LabelMode::Multinomial;
      else if (*v == "balanced") s.gen_label_mode = LabelMode::Balanced;
      else throw std::invalid_argument("config: generator.labels must be multinomial or balanced");
    }
  }

  if (s.mode == RunMode::SyntheticSweep) {
    if (auto v = cfg.take("sweep.parameter")) s.sweep_parameter = *v;
    s.sweep_values = to_double_list(cfg.require("sweep.values"), "sweep.values");
    s.sweep_replicates = to_int(cfg.require("sweep.replicates"), "sweep.replicates");
    if (auto v = cfg.take("sweep.target_layer"))
      s.sweep_target_layer = to_int(*v, "sweep.target_layer");
    for (const std::string& m : split_list(cfg.require("sweep.methods"))) {
      if (m == "joint_vb") s.methods.push_back(Method::JointVb);
      else if (m == "single_vb") s.methods.push_back(Method::SingleVb);
      else if (m == "spectral") s.methods.push_back(Method::Spectral);
      else throw std::invalid_argument("config: unknown method " + m);
    }
  }

  if (auto v = cfg.take("inference.tol")) s.inference.tol = to_double(*v, "inference.tol");
  if (auto v = cfg.take("inference.max_outer"))
    s.inference.max_outer = to_int(*v, "inference.max_outer");
  if (auto v = cfg.take("inference.max_inner"))
    s.inference.max_inner = to_int(*v, "inference.max_inner");
  if (auto v = cfg.take("inference.restarts"))
    s.inference.restarts = to_int(*v, "inference.restarts");
  if (auto v = cfg.take("inference.init")) {
    if (*v == "spectral") s.inference.init = InitMode::Spectral;
    else if (*v == "random") s.inference.init = InitMode::Random;
    else throw std::invalid_argument("config: inference.init must be spectral or random");
  }
  if (auto v = cfg.take("inference.damping"))
    s.inference.damping = to_double(*v, "inference.damping");
  if (auto v = cfg.take("inference.prior_in_mu"))
    s.inference.prior_in_mu = to_bool(*v, "inference.prior_in_mu");
  for (int l = 1; l <= 64; ++l) {
    const std::string tk = "inference.tau0." + std::to_string(l);
    if (!cfg.has(tk)) break;
    const std::vector<double> vals = to_double_list(*cfg.take(tk), tk);
    s.inference.tau0.push_back(Eigen::Map<const Eigen::VectorXd>(vals.data(), vals.size()));
  }

  if (s.mode == RunMode::RealFit || s.mode == RunMode::Select) {
    for (int i : cfg.indices_with_prefix("input")) {
      InputSpec in;
      const std::string base = "input." + std::to_string(i) + ".";
      if (auto v = cfg.take(base + "path")) in.paths.push_back(*v);
      if (auto v = cfg.take(base + "paths"))
        for (const std::string& p : split_list(*v)) in.paths.push_back(p);
      if (in.paths.empty())
        throw std::invalid_argument("config: input " + std::to_string(i) + " has no path");
      if (auto v = cfg.take(base + "format")) {
        if (*v == "dense_csv") in.format = AdjacencyFormat::DenseCsv;
        else if (*v == "edge_list_tsv") in.format = AdjacencyFormat::EdgeListTsv;
        else throw std::invalid_argument("config: unknown input format " + *v);
      }
      in.family = WeightFamily::parse(cfg.require(base + "family"));
      if (auto v = cfg.take(base + "n")) in.n = to_int(*v, base + "n");
      if (auto v = cfg.take(base + "preprocess")) {
        if (*v == "none") in.preprocess = InputSpec::Preprocess::None;
        else if (*v == "correlation_mean") in.preprocess = InputSpec::Preprocess::CorrelationMean;
        else if (v->rfind("correlation_value:", 0) == 0) {
          in.preprocess = InputSpec::Preprocess::CorrelationValue;
          in.threshold_value = to_double(v->substr(18), base + "preprocess");
        } else if (*v == "counts_round") {
          in.preprocess = InputSpec::Preprocess::CountsRound;
        } else {
          throw std::invalid_argument("config: unknown preprocess " + *v);
        }
      }
      if (in.paths.size() > 1 && in.preprocess != InputSpec::Preprocess::CountsRound)
        throw std::invalid_argument("config: multiple paths need counts_round preprocessing");
      s.inputs.push_back(std::move(in));
    }
    if (s.mode == RunMode::RealFit) {
      s.fit_k_shared = to_int(cfg.require("fit.k_shared"), "fit.k_shared");
      s.fit_k_total = to_int_list(cfg.require("fit.k_total"), "fit.k_total");
    } else {
      if (auto v = cfg.take("select.k_total_min"))
        s.select_k_total_min = to_int(*v, "select.k_total_min");
      if (auto v = cfg.take("select.k_total_max"))
        s.select_k_total_max = to_int(*v, "select.k_total_max");
    }
  }

  cfg.finish();
  s.validate();
  return s;
}

ExperimentSpec load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::string ExperimentSpec::to_config_text() const {
  std::ostringstream o;
  switch (mode) {
    case RunMode::SyntheticSweep: o << "mode = synthetic_sweep\n"; break;
    case RunMode::RealFit: o << "mode = real_fit\n"; break;
    case RunMode::Select: o << "mode = select\n"; break;
    case RunMode::Generate: o << "mode = generate\n"; break;
  }
  o << "seed = " << seed << "\n";
  o << "threads = " << threads << "\n";
  o << "output.dir = " << output_dir << "\n";

  auto join_ints = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
  };

  if (mode == RunMode::SyntheticSweep || mode == RunMode::Generate) {
    o << "generator.n = " << gen_n << "\n";
    o << "generator.layers = " << gen_layers << "\n";
    o << "generator.k_shared = " << gen_k_shared << "\n";
    o << "generator.k_total = " << join_ints(gen_k_total) << "\n";
    o << "generator.families = ";
    for (size_t i = 0; i < gen_families.size(); ++i)
      o << (i ? "," : "") << gen_families[i].name();
    o << "\n";
    o << "generator.p = " << fmt_double(gen_p) << "\n";
    o << "generator.q = " << fmt_double(gen_q) << "\n";
    for (const auto& [l, q] : gen_q_override)
      o << "generator.q." << l << " = " << fmt_double(q) << "\n";
    for (const auto& [l, mu] : gen_mu0) {
      o << "generator.mu0." << l << " = ";
      for (int i = 0; i < mu.size(); ++i) o << (i ? "," : "") << fmt_double(mu(i));
      o << "\n";
    }
    o << "generator.labels = "
      << (gen_label_mode == LabelMode::Multinomial ? "multinomial" : "balanced") << "\n";
  }

  if (mode == RunMode::SyntheticSweep) {
    o << "sweep.parameter = " << sweep_parameter << "\n";
    o << "sweep.values = ";
    for (size_t i = 0; i < sweep_values.size(); ++i)
      o << (i ? "," : "") << fmt_double(sweep_values[i]);
    o << "\n";
    o << "sweep.replicates = " << sweep_replicates << "\n";
    o << "sweep.target_layer = " << sweep_target_layer << "\n";
    o << "sweep.methods = ";
    for (size_t i = 0; i < methods.size(); ++i) o << (i ? "," : "") << method_name(methods[i]);
    o << "\n";
  }

  o << "inference.tol = " << fmt_double(inference.tol) << "\n";
  o << "inference.max_outer = " << inference.max_outer << "\n";
  o << "inference.max_inner = " << inference.max_inner << "\n";
  o << "inference.restarts = " << inference.restarts << "\n";
  o << "inference.init = " << (inference.init == InitMode::Random ? "random" : "spectral")
    << "\n";
  o << "inference.damping = " << fmt_double(inference.damping) << "\n";
  o << "inference.prior_in_mu = " << (inference.prior_in_mu ? "true" : "false") << "\n";
  for (size_t l = 0; l < inference.tau0.size(); ++l) {
    o << "inference.tau0." << l + 1 << " = ";
    for (int i = 0; i < inference.tau0[l].size(); ++i)
      o << (i ? "," : "") << fmt_double(inference.tau0[l](i));
    o << "\n";
  }

  if (mode == RunMode::RealFit || mode == RunMode::Select) {
    for (size_t i = 0; i < inputs.size(); ++i) {
      const InputSpec& in = inputs[i];
      const std::string base = "input." + std::to_string(i + 1) + ".";
      if (in.paths.size() == 1) {
        o << base << "path = " << in.paths[0] << "\n";
      } else {
        o << base << "paths = ";
        for (size_t p = 0; p < in.paths.size(); ++p) o << (p ? "," : "") << in.paths[p];
        o << "\n";
      }
      o << base << "format = "
        << (in.format == AdjacencyFormat::DenseCsv ? "dense_csv" : "edge_list_tsv") << "\n";
      o << base << "family = " << in.family.name() << "\n";
      if (in.n) o << base << "n = " << *in.n << "\n";
      switch (in.preprocess) {
        case InputSpec::Preprocess::None: o << base << "preprocess = none\n"; break;
        case InputSpec::Preprocess::CorrelationMean:
          o << base << "preprocess = correlation_mean\n";
          break;
        case InputSpec::Preprocess::CorrelationValue:
          o << base << "preprocess = correlation_value:" << fmt_double(in.threshold_value)
            << "\n";
          break;
        case InputSpec::Preprocess::CountsRound:
          o << base << "preprocess = counts_round\n";
          break;
      }
    }
    if (mode == RunMode::RealFit) {
      o << "fit.k_shared = " << fit_k_shared << "\n";
      o << "fit.k_total = " << join_ints(fit_k_total) << "\n";
    } else {
      o << "select.k_total_min = " << select_k_total_min << "\n";
      o << "select.k_total_max = " << select_k_total_max << "\n";
    }
  }
  return o.str();
}

MultilayerGraph load_inputs(const ExperimentSpec& spec, std::ostream* warnings) {
  MultilayerGraph g;
  for (const InputSpec& in : spec.inputs) {
    Eigen::MatrixXd m;
    if (in.preprocess == InputSpec::Preprocess::CountsRound) {
      std::vector<Eigen::MatrixXd> stack;
      for (const std::string& p : in.paths)
        stack.push_back(load_adjacency(p, in.format, in.n, warnings));
      m = preprocess_counts(stack, warnings);
    } else {
      m = load_adjacency(in.paths[0], in.format, in.n, warnings);
      if (in.preprocess == InputSpec::Preprocess::CorrelationMean)
        m = preprocess_correlation(m, Threshold::mean());
      else if (in.preprocess == InputSpec::Preprocess::CorrelationValue)
        m = preprocess_correlation(m, Threshold::at(in.threshold_value));
    }
    g.layers.push_back(std::move(m));
    g.families.push_back(in.family);
  }
  g.validate();
  return g;
}

}  // namespace mlwsbm
