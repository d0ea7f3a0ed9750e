#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graph_io.hpp"
#include "segred/kernels.hpp"
#include "segred/types.hpp"

namespace segred::cli {

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  /// Named shape ("cora", ...) or explicit node/edge counts: writes a graph.
  std::string graph;
  std::int64_t nodes = 0;
  std::int64_t edges = 0;
  /// Otherwise: a dataset list of bases x variants synthetic ids.
  int bases = 7;
  int variants = 3;
  std::int64_t min_segments = 128;
  std::int64_t max_segments = 2048;
  double max_avg = 16.0;
};

struct SweepArgs {
  std::vector<std::string> inputs;  ///< graph files, directories, or dataset list files
  std::optional<GraphFormat> format;
  std::vector<std::int64_t> feature_sizes;
  std::string db;
  int reps = 9;
  std::int64_t min_sample_ns = 300000;
  int workers = 0;
  std::uint64_t seed = 0;
  bool both_schedules = false;
  ElementKind element_kind = ElementKind::F32;
  std::string machine;
};

struct TrainArgs {
  std::string db;
  std::string trees;  ///< output directory
  int max_depth = 5;
  int min_leaf = 2;
  std::size_t holdout_every = 4;
  std::uint64_t seed = 0;
  int workers = 0;
};

struct CodegenArgs {
  std::string trees;
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct RunArgs {
  std::string graph;
  std::optional<GraphFormat> format;
  std::int64_t feature_size = 0;
  std::string features;  ///< optional matrix file replacing random X
  std::string op = "sum";
  std::string config;
  bool auto_config = false;
  std::string trees;
  std::string out;
  std::string text_out;
  int workers = 0;
  std::uint64_t seed = 0;
  int reps = 1;
  CommitMode commit = CommitMode::Deterministic;
  ElementKind element_kind = ElementKind::F32;
};

struct VerifyArgs {
  std::vector<std::string> inputs;
  std::optional<GraphFormat> format;
  std::vector<std::int64_t> feature_sizes{1, 4, 32};
  /// Check a Y file written by `run` instead of sweeping the config space.
  std::string check;
  std::string features;
  std::string op = "sum";
  int workers = 0;
  std::uint64_t seed = 0;
};

/// Each command writes its report to `out` and returns the exit status.
/// Errors are thrown; main turns them into exit status 1.
int cmd_synth(const SynthArgs& args, std::ostream& out);
int cmd_sweep(const SweepArgs& args, std::ostream& out);
int cmd_train(const TrainArgs& args, std::ostream& out);
int cmd_codegen(const CodegenArgs& args, std::ostream& out);
int cmd_run(const RunArgs& args, std::ostream& out);
int cmd_verify(const VerifyArgs& args, std::ostream& out);

/// Expands directories to their *.tsv / *.mtx files, sorted.
std::vector<std::string> expand_graph_inputs(const std::vector<std::string>& inputs);

/// Dataset list: one dataset_id per line, '#' comments.
std::vector<std::string> load_dataset_list(const std::string& path);

/// Paths of the two trees inside a trees directory.
std::string sr_tree_path(const std::string& dir);
std::string pr_tree_path(const std::string& dir);

}  // namespace segred::cli
