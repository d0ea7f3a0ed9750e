#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segred/features.hpp"
#include "segred/kernels.hpp"
#include "segred/perfdb.hpp"
#include "segred/schedule.hpp"

namespace segred {

/// Decision variables available to the rules.
enum class TreeFeature : std::uint8_t { Avg, IdxSize, F };

std::string_view to_string(TreeFeature f) noexcept;  ///< "avg", "idx_size", "F"
TreeFeature parse_tree_feature(std::string_view text);
double feature_value(const FeatureVector& fv, TreeFeature f) noexcept;

struct TreeNode {
  bool is_leaf = true;
  TreeFeature feature = TreeFeature::Avg;
  double threshold = 0.0;  ///< value <= threshold goes left
  int left = -1;
  int right = -1;
  KernelConfig config;  ///< leaves only

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Depth-bounded decision tree whose leaves are complete kernel configs.
/// Node 0 is the root. Immutable after construction.
class TreeModel {
 public:
  /// Validates shape (a proper tree rooted at 0), depth <= max_depth and
  /// that every leaf is a structurally valid config of schedule `tag`.
  /// Throws std::invalid_argument otherwise.
  TreeModel(Schedule tag, int max_depth, std::vector<TreeNode> nodes);

  static TreeModel single_leaf(const KernelConfig& cfg, int max_depth = 5);

  Schedule schedule() const noexcept { return schedule_; }
  int max_depth() const noexcept { return max_depth_; }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  const KernelConfig& predict(const FeatureVector& fv) const noexcept;

  /// Longest root-to-leaf path, counted in decisions.
  int depth() const noexcept;
  std::size_t leaf_count() const noexcept;
  std::size_t decision_count() const noexcept { return nodes_.size() - leaf_count(); }

  /// Leaf configs violating the candidate sets, as "leaf <node>: <violation>".
  std::vector<std::string> leaf_violations(const CandidateSets& candidates) const;

  friend bool operator==(const TreeModel&, const TreeModel&) = default;

 private:
  Schedule schedule_;
  int max_depth_;
  std::vector<TreeNode> nodes_;
};

struct TrainingRow {
  std::string dataset_id;
  FeatureVector features;
  KernelConfig label;

  friend bool operator==(const TrainingRow&, const TrainingRow&) = default;
};

struct TrainingSet {
  Schedule schedule = Schedule::SR;
  std::vector<TrainingRow> rows;
};

/// Best-measured config of each (dataset_id, F) group restricted to one
/// schedule; ties go to the lexicographically smallest config. Rows are
/// ordered by (dataset_id, F). Throws when no group matches.
TrainingSet top1_labels(const PerfDB& db, Schedule schedule);

struct FitOptions {
  int max_depth = 5;
  int min_leaf = 2;
};

/// CART on log2-encoded config parameters: each split minimizes the summed
/// per-dimension squared error of the children; leaves carry the most
/// frequent exact config (ties: smallest). G_t is not a target for SR.
TreeModel fit_tree(const TrainingSet& train, const FitOptions& opts = {});

/// Routes by default_schedule(F) to the matching tree.
KernelConfig predict_config(const TreeModel& sr_tree, const TreeModel& pr_tree, const FeatureVector& fv);

/// Selector for ExecOptions backed by a pair of trees (copied).
ConfigSelector make_tree_selector(const TreeModel& sr_tree, const TreeModel& pr_tree);

/// Indented node-per-line text; see docs/formats.md.
std::string format_tree(const TreeModel& tree, std::optional<std::uint64_t> seed = std::nullopt);
TreeModel parse_tree(const std::string& text, const std::string& source = "<string>",
                     const CandidateSets& candidates = CandidateSets::defaults());
void save_tree(const TreeModel& tree, const std::string& path,
               std::optional<std::uint64_t> seed = std::nullopt);
TreeModel load_tree(const std::string& path,
                    const CandidateSets& candidates = CandidateSets::defaults());

}  // namespace segred
