#include "mlwsbm/sweep.hpp"

#include "mlwsbm/baselines.hpp"
#include "mlwsbm/selection.hpp"
#include "parallel.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>

namespace mlwsbm {

namespace {

struct TaskResult {
  bool ok = false;
  std::string error;
  // One entry per method: NMI per layer (single-layer methods fill only
  // the target layer).
  std::vector<std::vector<double>> nmi;
  double max_elbo_dip = 0.0;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt_grid(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

SweepResults run_sweep(const ExperimentSpec& spec, std::ostream* diag) {
  spec.validate();
  if (spec.mode != RunMode::SyntheticSweep)
    throw std::invalid_argument("run_sweep: spec mode must be synthetic_sweep");

  const int n_grid = static_cast<int>(spec.sweep_values.size());
  const int n_rep = spec.sweep_replicates;
  const int target = spec.sweep_target_layer - 1;
  const int n_methods = static_cast<int>(spec.methods.size());

  std::vector<TaskResult> results(static_cast<size_t>(n_grid) * n_rep);
  std::mutex diag_mutex;

  detail::parallel_for(n_grid * n_rep, spec.threads, [&](int task) {
    const int gi = task / n_rep;
    const int rep = task % n_rep;
    TaskResult& out = results[task];
    try {
      GeneratorConfig config = spec.generator_config();
      config.theta[target] =
          planted_theta(spec.gen_p, spec.sweep_values[gi], config.k_total[target]);

      const std::uint64_t rep_seed = spec.seed + static_cast<std::uint64_t>(rep);
      std::mt19937_64 gen_rng(num::mix_seed(rep_seed, 0));
      const CommunityStructure truth = sample_labels(config, gen_rng);
      const MultilayerGraph graph = sample_graph(config, truth, gen_rng);

      out.nmi.resize(n_methods);
      for (int m = 0; m < n_methods; ++m) {
        const Method method = spec.methods[m];
        InferenceOptions opt = spec.inference;
        opt.seed = num::mix_seed(rep_seed, 1 + static_cast<std::uint64_t>(m));
        out.nmi[m].assign(graph.num_layers(), -1.0);
        switch (method) {
          case Method::JointVb: {
            const FitResult fit =
                run(graph, config.k_shared, config.k_total, opt);
            out.max_elbo_dip = std::max(out.max_elbo_dip, fit.max_elbo_dip);
            for (int l = 0; l < graph.num_layers(); ++l)
              out.nmi[m][l] = nmi(fit.labels.labels[l], truth.labels[l]);
            break;
          }
          case Method::SingleVb: {
            const FitResult fit = single_layer_vb(
                graph.layers[target], graph.families[target], config.k_total[target], opt);
            out.max_elbo_dip = std::max(out.max_elbo_dip, fit.max_elbo_dip);
            out.nmi[m][target] = nmi(fit.labels.labels[0], truth.labels[target]);
            break;
          }
          case Method::Spectral: {
            SpectralOptions so;
            so.k = config.k_total[target];
            so.seed = opt.seed;
            const std::vector<int> labels = spectral_clustering(graph.layers[target], so);
            out.nmi[m][target] = nmi(labels, truth.labels[target]);
            break;
          }
        }
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
      if (diag) {
        std::lock_guard<std::mutex> lock(diag_mutex);
        *diag << "replicate " << rep << " at grid value " << spec.sweep_values[gi]
              << " failed: " << e.what() << "\n";
      }
    }
  });

  SweepResults res;
  for (const TaskResult& t : results) {
    res.max_elbo_dip = std::max(res.max_elbo_dip, t.max_elbo_dip);
    if (!t.ok) ++res.failed_replicates;
  }
  for (int m = 0; m < n_methods; ++m) {
    for (int gi = 0; gi < n_grid; ++gi) {
      SweepRow row;
      row.method = spec.methods[m];
      row.grid_value = spec.sweep_values[gi];
      std::vector<double> values;
      for (int rep = 0; rep < n_rep; ++rep) {
        const TaskResult& t = results[static_cast<size_t>(gi) * n_rep + rep];
        if (!t.ok) continue;
        values.push_back(t.nmi[m][target]);
        for (int l = 0; l < static_cast<int>(t.nmi[m].size()); ++l)
          if (t.nmi[m][l] >= 0.0)
            res.details.push_back(
                {spec.methods[m], spec.sweep_values[gi], rep, l + 1, t.nmi[m][l]});
      }
      row.n_rep = static_cast<int>(values.size());
      if (row.n_rep > 0) {
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean_nmi = sum / row.n_rep;
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean_nmi) * (v - row.mean_nmi);
        row.stderr_nmi =
            row.n_rep > 1 ? std::sqrt(ss / (row.n_rep - 1.0) / row.n_rep) : 0.0;
      }
      res.rows.push_back(row);
    }
  }
  return res;
}

std::string sweep_csv(const SweepResults& results, const std::string& parameter) {
  std::ostringstream o;
  o << "method," << parameter << ",mean_nmi,stderr,n_rep\n";
  for (const SweepRow& r : results.rows)
    o << method_name(r.method) << "," << fmt_grid(r.grid_value) << "," << fmt(r.mean_nmi)
      << "," << fmt(r.stderr_nmi) << "," << r.n_rep << "\n";
  return o.str();
}

std::string sweep_detail_csv(const SweepResults& results, const std::string& parameter) {
  std::ostringstream o;
  o << "method," << parameter << ",replicate,layer,nmi\n";
  for (const SweepDetail& d : results.details)
    o << method_name(d.method) << "," << fmt_grid(d.grid_value) << "," << d.replicate << ","
      << d.layer << "," << fmt(d.nmi) << "\n";
  return o.str();
}

}  // namespace mlwsbm
