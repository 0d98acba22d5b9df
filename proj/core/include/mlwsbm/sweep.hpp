#pragma once

#include "mlwsbm/experiment.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mlwsbm {

struct SweepRow {
  Method method;
  double grid_value = 0.0;
  double mean_nmi = 0.0;
  double stderr_nmi = 0.0;
  int n_rep = 0;
};

struct SweepDetail {
  Method method;
  double grid_value = 0.0;
  int replicate = 0;
  int layer = 0;  // 1-based
  double nmi = 0.0;
};

struct SweepResults {
  std::vector<SweepRow> rows;        // summary over replicates, target layer
  std::vector<SweepDetail> details;  // per replicate, per layer
  double max_elbo_dip = 0.0;         // worst relative ELBO decrease seen
  int failed_replicates = 0;
};

/// The synthetic benchmark: for every grid value and replicate, sample a
/// planted multilayer graph, run each method and record NMI against the
/// ground truth. Replicate r is seeded with base seed + r, so results do
/// not depend on the thread count.
SweepResults run_sweep(const ExperimentSpec& spec, std::ostream* diag = nullptr);

/// CSV with header method,<parameter>,mean_nmi,stderr,n_rep.
std::string sweep_csv(const SweepResults& results, const std::string& parameter);

/// CSV with header method,<parameter>,replicate,layer,nmi.
std::string sweep_detail_csv(const SweepResults& results, const std::string& parameter);

}  // namespace mlwsbm
