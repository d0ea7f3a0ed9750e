#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "segred/types.hpp"

namespace {

using namespace segred::cli;

std::vector<std::int64_t> parse_size_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const long long v = std::stoll(item, &used);
    if (used != item.size() || v < 1) throw CLI::ValidationError("--feature-size", "bad entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::optional<GraphFormat> format_flag(const std::string& text) {
  if (text.empty() || text == "auto") return std::nullopt;
  return parse_graph_format(text);
}

segred::ElementKind element_flag(const std::string& text) { return segred::parse_element_kind(text); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segred: segment reduction kernels, benchmarking and config autotuning"};
  app.set_version_flag("--version", std::string(segred::kVersion));
  app.require_subcommand(1);

  std::string format, element = "f32", features_text, commit = "deterministic";

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset list or a synthetic graph");
  synth_cmd->add_option("--out", synth.out, "Output file")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--graph", synth.graph, "Write a graph with a reference shape (e.g. cora)");
  synth_cmd->add_option("--nodes", synth.nodes, "Write a graph with this many nodes");
  synth_cmd->add_option("--edges", synth.edges, "Edge count for --nodes");
  synth_cmd->add_option("--bases", synth.bases, "Base synthetic datasets");
  synth_cmd->add_option("--variants", synth.variants, "Augmented variants per base");
  synth_cmd->add_option("--min-segments", synth.min_segments, "Smallest base segment count");
  synth_cmd->add_option("--max-segments", synth.max_segments, "Largest base segment count");
  synth_cmd->add_option("--max-avg", synth.max_avg, "Largest base average segment length (>= 1)");

  SweepArgs sweep;
  std::string sweep_fs = "1,2,32,64";
  auto* sweep_cmd = app.add_subcommand("sweep", "Benchmark the config space into a performance DB");
  sweep_cmd->add_option("inputs", sweep.inputs, "Graph files, directories, or dataset list files")->required();
  sweep_cmd->add_option("--db", sweep.db, "Performance DB file (resumed if present)")->required();
  sweep_cmd->add_option("--feature-size", sweep_fs, "Comma-separated F values");
  sweep_cmd->add_option("--format", format, "Graph format: tsv, mtx or auto");
  sweep_cmd->add_option("--reps", sweep.reps, "Timed rounds per point (>= 3)");
  sweep_cmd->add_option("--min-sample-ns", sweep.min_sample_ns, "Shortest timed sample; kernels repeat to fill it");
  sweep_cmd->add_option("--workers", sweep.workers, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--seed", sweep.seed, "Seed for a new DB's inputs");
  sweep_cmd->add_option("--element", element, "f32 or f64");
  sweep_cmd->add_option("--machine", sweep.machine, "Machine tag for a new DB");
  sweep_cmd->add_flag("--both-schedules", sweep.both_schedules, "Measure SR and PR for every F");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit the SR and PR config trees from a performance DB");
  train_cmd->add_option("--db", train.db, "Performance DB file")->required();
  train_cmd->add_option("--trees", train.trees, "Output directory for sr.tree and pr.tree")->required();
  train_cmd->add_option("--max-depth", train.max_depth, "Tree depth cap");
  train_cmd->add_option("--min-leaf", train.min_leaf, "Minimum samples per leaf");
  train_cmd->add_option("--holdout-every", train.holdout_every, "Every k-th dataset_id is held out");
  train_cmd->add_option("--seed", train.seed, "Seed recorded in the tree headers");
  train_cmd->add_option("--workers", train.workers, "Worker threads for on-demand measurement");

  CodegenArgs gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("codegen", "Emit a C++ dispatch header from trained trees");
  gen_cmd->add_option("--trees", gen.trees, "Directory holding sr.tree and pr.tree")->required();
  gen_cmd->add_option("--out", gen.out, "Output header")->required();
  auto* gen_seed_opt = gen_cmd->add_option("--seed", gen_seed, "Seed recorded in the header");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Aggregate random or given features over a graph");
  run_cmd->add_option("graph", run.graph, "Graph file")->required();
  run_cmd->add_option("--format", format, "Graph format: tsv, mtx or auto");
  run_cmd->add_option("--feature-size", run.feature_size, "F, the width of random X");
  run_cmd->add_option("--features", run.features, "Matrix file to use as X");
  run_cmd->add_option("--op", run.op, "sum, mean or max")->check(CLI::IsMember({"sum", "mean", "max"}));
  run_cmd->add_option("--config", run.config, "Kernel config, e.g. SR,T_N=32,T_M=8,M_t=8,N_t=1");
  run_cmd->add_flag("--auto", run.auto_config, "Pick the config with trained trees");
  run_cmd->add_option("--trees", run.trees, "Directory holding sr.tree and pr.tree");
  run_cmd->add_option("--out", run.out, "Write Y as a matrix file");
  run_cmd->add_option("--text", run.text_out, "Also write Y as tab-separated text");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)");
  run_cmd->add_option("--seed", run.seed, "Seed for random X");
  run_cmd->add_option("--reps", run.reps, "Timed repetitions (median reported)");
  run_cmd->add_option("--element", element, "f32 or f64");
  run_cmd->add_option("--commit", commit, "deterministic or atomic")
      ->check(CLI::IsMember({"deterministic", "atomic"}));

  VerifyArgs verify;
  std::string verify_fs = "1,4,32";
  auto* verify_cmd = app.add_subcommand("verify", "Check kernels against the serial reference");
  verify_cmd->add_option("inputs", verify.inputs, "Graph files or directories")->required();
  verify_cmd->add_option("--format", format, "Graph format: tsv, mtx or auto");
  verify_cmd->add_option("--feature-size", verify_fs, "Comma-separated F values");
  verify_cmd->add_option("--check", verify.check, "Matrix file written by run to check");
  verify_cmd->add_option("--features", verify.features, "Matrix file used as X by run");
  verify_cmd->add_option("--op", verify.op, "Op used by run")->check(CLI::IsMember({"sum", "mean", "max"}));
  verify_cmd->add_option("--workers", verify.workers, "Worker threads (0 = all cores)");
  verify_cmd->add_option("--seed", verify.seed, "Seed for random X");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) return cmd_synth(synth, std::cout);
    if (*sweep_cmd) {
      sweep.feature_sizes = parse_size_list(sweep_fs);
      sweep.format = format_flag(format);
      sweep.element_kind = element_flag(element);
      return cmd_sweep(sweep, std::cout);
    }
    if (*train_cmd) return cmd_train(train, std::cout);
    if (*gen_cmd) {
      if (*gen_seed_opt) gen.seed = gen_seed;
      return cmd_codegen(gen, std::cout);
    }
    if (*run_cmd) {
      run.format = format_flag(format);
      run.element_kind = element_flag(element);
      run.commit = commit == "atomic" ? segred::CommitMode::Atomic : segred::CommitMode::Deterministic;
      return cmd_run(run, std::cout);
    }
    if (*verify_cmd) {
      verify.feature_sizes = parse_size_list(verify_fs);
      verify.format = format_flag(format);
      return cmd_verify(verify, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "segred: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
