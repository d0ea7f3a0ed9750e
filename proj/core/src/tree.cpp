#include "segred/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace segred {

std::string_view to_string(TreeFeature f) noexcept {
  switch (f) {
    case TreeFeature::Avg: return "avg";
    case TreeFeature::IdxSize: return "idx_size";
    case TreeFeature::F: return "F";
  }
  return "avg";
}

TreeFeature parse_tree_feature(std::string_view text) {
  if (text == "avg") return TreeFeature::Avg;
  if (text == "idx_size") return TreeFeature::IdxSize;
  if (text == "F") return TreeFeature::F;
  throw std::invalid_argument("unknown tree feature '" + std::string(text) + "'");
}

double feature_value(const FeatureVector& fv, TreeFeature f) noexcept {
  switch (f) {
    case TreeFeature::Avg: return fv.avg;
    case TreeFeature::IdxSize: return static_cast<double>(fv.idx_size);
    case TreeFeature::F: return static_cast<double>(fv.feature_size);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// TreeModel

TreeModel::TreeModel(Schedule tag, int max_depth, std::vector<TreeNode> nodes)
    : schedule_(tag), max_depth_(max_depth), nodes_(std::move(nodes)) {
  if (max_depth_ < 0) throw std::invalid_argument("tree: max_depth must be >= 0");
  if (nodes_.empty()) throw std::invalid_argument("tree: no nodes");
  const int n = static_cast<int>(nodes_.size());
  std::vector<int> parents(nodes_.size(), 0);
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf) {
      if (node.config.schedule != tag) {
        throw std::invalid_argument("tree: leaf " + std::to_string(i) + " has schedule " +
                                    std::string(to_string(node.config.schedule)) + ", tree is " +
                                    std::string(to_string(tag)));
      }
      if (auto v = structural_violations(node.config); !v.empty()) {
        throw std::invalid_argument("tree: leaf " + std::to_string(i) + " config invalid: " + v.front());
      }
      continue;
    }
    if (!std::isfinite(node.threshold)) {
      throw std::invalid_argument("tree: node " + std::to_string(i) + " has a non-finite threshold");
    }
    for (int child : {node.left, node.right}) {
      if (child <= 0 || child >= n) {
        throw std::invalid_argument("tree: node " + std::to_string(i) + " has bad child " + std::to_string(child));
      }
      ++parents[static_cast<std::size_t>(child)];
    }
  }
  for (int i = 1; i < n; ++i) {
    if (parents[static_cast<std::size_t>(i)] != 1) {
      throw std::invalid_argument("tree: node " + std::to_string(i) + " is not referenced exactly once");
    }
  }
  // Every node reachable from the root, no cycles: walk with an explicit stack.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    if (++visited > nodes_.size()) throw std::invalid_argument("tree: cycle detected");
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf) {
      if (d > max_depth_) {
        throw std::invalid_argument("tree: depth " + std::to_string(d) + " exceeds max_depth " +
                                    std::to_string(max_depth_));
      }
      continue;
    }
    stack.emplace_back(node.left, d + 1);
    stack.emplace_back(node.right, d + 1);
  }
  if (visited != nodes_.size()) throw std::invalid_argument("tree: unreachable nodes");
}

TreeModel TreeModel::single_leaf(const KernelConfig& cfg, int max_depth) {
  TreeNode leaf;
  leaf.config = cfg;
  return TreeModel(cfg.schedule, max_depth, {leaf});
}

const KernelConfig& TreeModel::predict(const FeatureVector& fv) const noexcept {
  std::size_t i = 0;
  while (!nodes_[i].is_leaf) {
    const TreeNode& node = nodes_[i];
    i = static_cast<std::size_t>(feature_value(fv, node.feature) <= node.threshold ? node.left : node.right);
  }
  return nodes_[i].config;
}

int TreeModel::depth() const noexcept {
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    const TreeNode& node = nodes_[static_cast<std::size_t>(i)];
    if (node.is_leaf) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return best;
}

std::size_t TreeModel::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

std::vector<std::string> TreeModel::leaf_violations(const CandidateSets& candidates) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf) continue;
    for (const auto& v : validate_config(nodes_[i].config, candidates)) {
      out.push_back("leaf " + std::to_string(i) + ": " + v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainingSet top1_labels(const PerfDB& db, Schedule schedule) {
  std::map<std::pair<std::string, std::int64_t>, const PerfRecord*> best;
  for (const auto& r : db.records()) {
    if (r.config.schedule != schedule) continue;
    auto key = std::make_pair(r.dataset_id, r.features.feature_size);
    auto [it, inserted] = best.emplace(key, &r);
    if (inserted) continue;
    const PerfRecord* cur = it->second;
    if (r.gflops > cur->gflops || (r.gflops == cur->gflops && r.config < cur->config)) it->second = &r;
  }
  if (best.empty()) {
    throw std::invalid_argument("top1_labels: no " + std::string(to_string(schedule)) + " records");
  }
  TrainingSet out;
  out.schedule = schedule;
  for (const auto& [key, rec] : best) out.rows.push_back({rec->dataset_id, rec->features, rec->config});
  return out;
}

namespace {

constexpr TreeFeature kFeatures[] = {TreeFeature::Avg, TreeFeature::IdxSize, TreeFeature::F};

std::vector<double> encode(const KernelConfig& cfg, Schedule schedule) {
  std::vector<double> v{std::log2(cfg.t_n), std::log2(cfg.t_m), std::log2(cfg.m_t), std::log2(cfg.n_t)};
  if (schedule == Schedule::PR) v.push_back(std::log2(cfg.g_t));
  return v;
}

class CartBuilder {
 public:
  CartBuilder(const TrainingSet& train, const FitOptions& opts) : train_(train), opts_(opts) {
    for (const auto& row : train.rows) targets_.push_back(encode(row.label, train.schedule));
    dims_ = targets_.empty() ? 0 : targets_.front().size();
  }

  std::vector<TreeNode> build() {
    std::vector<std::size_t> all(train_.rows.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    grow(all, 0);
    return std::move(nodes_);
  }

 private:
  struct Split {
    TreeFeature feature = TreeFeature::Avg;
    double threshold = 0.0;
    double sse = 0.0;
  };

  double sse_of(const std::vector<std::size_t>& rows) const {
    double total = 0.0;
    for (std::size_t d = 0; d < dims_; ++d) {
      double sum = 0.0, sq = 0.0;
      for (auto r : rows) {
        sum += targets_[r][d];
        sq += targets_[r][d] * targets_[r][d];
      }
      total += sq - sum * sum / static_cast<double>(rows.size());
    }
    return std::max(0.0, total);
  }

  KernelConfig majority(const std::vector<std::size_t>& rows) const {
    std::map<KernelConfig, std::size_t> counts;
    for (auto r : rows) ++counts[train_.rows[r].label];
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;  // map order keeps the smallest on ties
    }
    return best->first;
  }

  bool pure(const std::vector<std::size_t>& rows) const {
    for (auto r : rows) {
      if (!(train_.rows[r].label == train_.rows[rows.front()].label)) return false;
    }
    return true;
  }

  std::optional<Split> best_split(const std::vector<std::size_t>& rows) const {
    const std::size_t n = rows.size();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, opts_.min_leaf));
    std::optional<Split> best;
    for (TreeFeature f : kFeatures) {
      std::vector<std::size_t> order = rows;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return feature_value(train_.rows[a].features, f) < feature_value(train_.rows[b].features, f);
      });
      // Prefix sums of targets and squared targets along the sorted order.
      std::vector<double> sum(dims_, 0.0), sq(dims_, 0.0), total(dims_, 0.0), total_sq(dims_, 0.0);
      for (auto r : order) {
        for (std::size_t d = 0; d < dims_; ++d) {
          total[d] += targets_[r][d];
          total_sq[d] += targets_[r][d] * targets_[r][d];
        }
      }
      for (std::size_t p = 1; p < n; ++p) {
        const std::size_t r = order[p - 1];
        for (std::size_t d = 0; d < dims_; ++d) {
          sum[d] += targets_[r][d];
          sq[d] += targets_[r][d] * targets_[r][d];
        }
        const double lo = feature_value(train_.rows[order[p - 1]].features, f);
        const double hi = feature_value(train_.rows[order[p]].features, f);
        if (!(lo < hi) || p < min_leaf || n - p < min_leaf) continue;
        double sse = 0.0;
        const auto nl = static_cast<double>(p);
        const auto nr = static_cast<double>(n - p);
        for (std::size_t d = 0; d < dims_; ++d) {
          sse += std::max(0.0, sq[d] - sum[d] * sum[d] / nl);
          const double rs = total[d] - sum[d];
          sse += std::max(0.0, (total_sq[d] - sq[d]) - rs * rs / nr);
        }
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        if (!best || sse < best->sse) best = Split{f, threshold, sse};
      }
    }
    return best;
  }

  int grow(const std::vector<std::size_t>& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const auto min_leaf = static_cast<std::size_t>(std::max(1, opts_.min_leaf));
    std::optional<Split> split;
    if (depth < opts_.max_depth && rows.size() >= 2 * min_leaf && !pure(rows)) {
      split = best_split(rows);
      const double parent = sse_of(rows);
      if (split && !(split->sse < parent - 1e-12 * (1.0 + parent))) split.reset();
    }
    if (!split) {
      nodes_[static_cast<std::size_t>(id)].config = majority(rows);
      return id;
    }
    std::vector<std::size_t> left, right;
    for (auto r : rows) {
      (feature_value(train_.rows[r].features, split->feature) <= split->threshold ? left : right).push_back(r);
    }
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    node.is_leaf = false;
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  const TrainingSet& train_;
  FitOptions opts_;
  std::vector<std::vector<double>> targets_;
  std::size_t dims_ = 0;
  std::vector<TreeNode> nodes_;
};

}  // namespace

TreeModel fit_tree(const TrainingSet& train, const FitOptions& opts) {
  if (train.rows.size() < 2) throw std::invalid_argument("fit_tree: need at least 2 training rows");
  if (opts.max_depth < 0) throw std::invalid_argument("fit_tree: max_depth must be >= 0");
  for (const auto& row : train.rows) {
    if (row.label.schedule != train.schedule) {
      throw std::invalid_argument("fit_tree: label " + format_config(row.label) + " does not match schedule " +
                                  std::string(to_string(train.schedule)));
    }
  }
  CartBuilder builder(train, opts);
  return TreeModel(train.schedule, opts.max_depth, builder.build());
}

KernelConfig predict_config(const TreeModel& sr_tree, const TreeModel& pr_tree, const FeatureVector& fv) {
  return default_schedule(fv.feature_size) == Schedule::SR ? sr_tree.predict(fv) : pr_tree.predict(fv);
}

ConfigSelector make_tree_selector(const TreeModel& sr_tree, const TreeModel& pr_tree) {
  return [sr = sr_tree, pr = pr_tree](const SegmentedIndex& idx, std::int64_t f) {
    return predict_config(sr, pr, extract_features(idx, f));
  };
}

}  // namespace segred
