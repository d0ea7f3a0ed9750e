#include "segred/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace segred {

RuleReport evaluate_predictor(const PerfDB& holdout, const ConfigPredictor& predict,
                              const OnDemandMeasure& measure) {
  std::map<std::pair<std::string, std::int64_t>, std::vector<const PerfRecord*>> groups;
  for (const auto& r : holdout.records()) groups[{r.dataset_id, r.features.feature_size}].push_back(&r);
  if (groups.empty()) throw std::invalid_argument("evaluate: holdout DB is empty");

  RuleReport report;
  double log_sum = 0.0;
  for (const auto& [key, recs] : groups) {
    const PerfRecord* best = recs.front();
    for (const auto* r : recs) {
      if (r->gflops > best->gflops || (r->gflops == best->gflops && r->config < best->config)) best = r;
    }
    GroupRatio g;
    g.dataset_id = key.first;
    g.feature_size = key.second;
    g.best = best->config;
    g.best_gflops = best->gflops;
    g.predicted = predict(best->features);
    if (const PerfRecord* hit = holdout.find({key.first, key.second, g.predicted})) {
      g.predicted_gflops = hit->gflops;
    } else if (measure) {
      g.predicted_gflops = measure(key.first, key.second, g.predicted);
      g.measured_on_demand = true;
    } else {
      throw std::invalid_argument("evaluate: predicted config " + format_config(g.predicted) +
                                  " not measured for " + key.first + " F=" + std::to_string(key.second));
    }
    g.ratio = g.predicted_gflops / g.best_gflops;
    log_sum += std::log(g.ratio);
    report.groups.push_back(std::move(g));
  }
  report.geomean_ratio = std::exp(log_sum / static_cast<double>(report.groups.size()));
  return report;
}

RuleReport evaluate_rules(const PerfDB& holdout, const TreeModel& sr_tree, const TreeModel& pr_tree,
                          const OnDemandMeasure& measure) {
  return evaluate_predictor(
      holdout, [&](const FeatureVector& fv) { return predict_config(sr_tree, pr_tree, fv); }, measure);
}

std::pair<PerfDB, PerfDB> holdout_split(const PerfDB& db, std::size_t every) {
  if (every < 2) throw std::invalid_argument("holdout_split: every must be >= 2");
  std::set<std::string> ids;
  for (const auto& r : db.records()) ids.insert(r.dataset_id);
  std::set<std::string> held;
  std::size_t i = 0;
  for (const auto& id : ids) {
    if (++i % every == 0) held.insert(id);
  }
  PerfDB train(db.metadata()), holdout(db.metadata());
  for (const auto& r : db.records()) (held.count(r.dataset_id) ? holdout : train).insert(r);
  return {std::move(train), std::move(holdout)};
}

std::string format_report(const RuleReport& report) {
  std::string out = "dataset_id\tF\tpredicted\tbest\tpredicted_gflops\tbest_gflops\tratio\n";
  char buf[128];
  for (const auto& g : report.groups) {
    std::snprintf(buf, sizeof buf, "\t%.6g\t%.6g\t%.4f", g.predicted_gflops, g.best_gflops, g.ratio);
    out += g.dataset_id + "\t" + std::to_string(g.feature_size) + "\t" + format_config(g.predicted) +
           (g.measured_on_demand ? "*" : "") + "\t" + format_config(g.best) + buf + "\n";
  }
  std::snprintf(buf, sizeof buf, "geomean_ratio\t%.4f\n", report.geomean_ratio);
  return out + buf;
}

}  // namespace segred
