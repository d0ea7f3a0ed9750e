#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "segred/perfdb.hpp"
#include "segred/tree.hpp"

namespace segred {

struct GroupRatio {
  std::string dataset_id;
  std::int64_t feature_size = 0;
  KernelConfig predicted;
  KernelConfig best;
  double predicted_gflops = 0.0;
  double best_gflops = 0.0;
  double ratio = 0.0;  ///< predicted_gflops / best_gflops
  bool measured_on_demand = false;
};

struct RuleReport {
  double geomean_ratio = 0.0;
  std::vector<GroupRatio> groups;
};

using ConfigPredictor = std::function<KernelConfig(const FeatureVector&)>;

/// Measures a config that the holdout DB lacks; returns GFlops.
using OnDemandMeasure =
    std::function<double(const std::string& dataset_id, std::int64_t feature_size, const KernelConfig&)>;

/// Ratio of predicted to best GFlops per (dataset_id, F) group of the
/// holdout DB. Throws if a prediction is unmeasured and no measure is given.
RuleReport evaluate_predictor(const PerfDB& holdout, const ConfigPredictor& predict,
                              const OnDemandMeasure& measure = {});

RuleReport evaluate_rules(const PerfDB& holdout, const TreeModel& sr_tree, const TreeModel& pr_tree,
                          const OnDemandMeasure& measure = {});

/// Splits by dataset_id: every `every`-th distinct id (sorted, starting at
/// offset `every - 1`) goes to the holdout side. Returns {train, holdout}.
std::pair<PerfDB, PerfDB> holdout_split(const PerfDB& db, std::size_t every);

/// Text table of a report, one group per line.
std::string format_report(const RuleReport& report);

}  // namespace segred
