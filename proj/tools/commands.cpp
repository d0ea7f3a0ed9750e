#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "matrix_io.hpp"
#include "segred/benchmark.hpp"
#include "segred/codegen.hpp"
#include "segred/compare.hpp"
#include "segred/dataset_id.hpp"
#include "segred/evaluate.hpp"
#include "segred/features.hpp"
#include "segred/perfdb.hpp"
#include "segred/schedule.hpp"
#include "segred/segment_reduce.hpp"
#include "segred/sweep.hpp"
#include "segred/synth.hpp"
#include "segred/tree.hpp"

namespace segred::cli {
namespace fs = std::filesystem;

namespace {

bool is_graph_file(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".tsv" || ext == ".mtx" || ext == ".edges";
}

void write_text(const std::string& path, const std::string& text) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string machine_tag(const std::string& requested) {
  if (!requested.empty()) return requested;
  if (const char* host = std::getenv("HOSTNAME"); host && *host) return host;
  return "localhost";
}

GraphIndexLoader graph_loader(std::optional<GraphFormat> format) {
  return [format](const std::string& path) { return load_graph(path, format).dst_index(); };
}

std::string fmt_double(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// Serial reference for w-scaled gather reduction, plus the same fold over
// magnitudes so comparisons tolerate cancellation.
template <typename T>
std::pair<FeatureMatrix<T>, FeatureMatrix<T>> weighted_reference(const EdgeList& g, const FeatureMatrix<T>& x) {
  FeatureMatrix<T> y(static_cast<std::size_t>(g.num_nodes), x.cols());
  FeatureMatrix<T> mag(static_cast<std::size_t>(g.num_nodes), x.cols());
  for (std::size_t m = 0; m < g.size(); ++m) {
    const auto w = static_cast<T>(g.weight[m]);
    auto src = x.row(static_cast<std::size_t>(g.src[m]));
    auto dst = y.row(static_cast<std::size_t>(g.dst[m]));
    auto dmag = mag.row(static_cast<std::size_t>(g.dst[m]));
    for (std::size_t c = 0; c < x.cols(); ++c) {
      dst[c] += w * src[c];
      dmag[c] += std::abs(w * src[c]);
    }
  }
  return {std::move(y), std::move(mag)};
}

template <typename T>
std::optional<std::string> weighted_mismatch(const FeatureMatrix<T>& expected, const FeatureMatrix<T>& mag,
                                             const FeatureMatrix<T>& actual, double rel) {
  if (expected.rows() != actual.rows() || expected.cols() != actual.cols()) return "shape differs";
  for (std::size_t r = 0; r < expected.rows(); ++r) {
    for (std::size_t c = 0; c < expected.cols(); ++c) {
      const double e = expected(r, c), a = actual(r, c);
      if (std::abs(a - e) > rel * static_cast<double>(mag(r, c)) + std::numeric_limits<T>::denorm_min()) {
        return "(" + std::to_string(r) + ", " + std::to_string(c) + "): expected " + std::to_string(e) +
               ", got " + std::to_string(a);
      }
    }
  }
  return std::nullopt;
}

// Oracle output under the library's default convention: Max over an empty
// segment reads 0.
template <typename T>
FeatureMatrix<T> unweighted_reference(const EdgeList& g, const FeatureMatrix<T>& x, ReduceOp op) {
  const auto dst = g.dst_index();
  auto y = segment_reduce_oracle(dst, gather<T>(g.src, x), op);
  if (op.is_max()) {
    const auto counts = dst.segment_counts();
    for (std::size_t r = 0; r < y.rows(); ++r) {
      if (counts[r] == 0) std::fill(y.row(r).begin(), y.row(r).end(), T(0));
    }
  }
  return y;
}

template <typename T>
FeatureMatrix<T> input_features(const EdgeList& g, std::int64_t f, const std::string& path, std::uint64_t seed) {
  if (path.empty()) return random_features<T>(static_cast<std::size_t>(g.num_nodes), static_cast<std::size_t>(f), seed);
  MatrixFile file = load_matrix(path);
  auto* m = std::get_if<FeatureMatrix<T>>(&file.data);
  if (!m) throw std::runtime_error(path + ": element kind does not match --element");
  if (static_cast<std::int64_t>(m->rows()) != g.num_nodes) {
    throw std::runtime_error(path + ": has " + std::to_string(m->rows()) + " rows, graph has " +
                             std::to_string(g.num_nodes) + " nodes");
  }
  return std::move(*m);
}

template <typename T>
int run_typed(const RunArgs& args, const EdgeList& g, std::ostream& out) {
  const ReduceOp op = parse_reduce_op(args.op);
  const auto x = input_features<T>(g, args.feature_size, args.features, args.seed);
  const auto dst = g.dst_index();
  const auto f = static_cast<std::int64_t>(x.cols());

  KernelConfig cfg;
  std::string source;
  if (!args.config.empty()) {
    cfg = parse_config(args.config);
    if (auto v = structural_violations(cfg); !v.empty()) {
      throw std::invalid_argument("--config " + args.config + ": " + v.front());
    }
    source = "config";
  } else if (args.auto_config) {
    const auto sr = load_tree(sr_tree_path(args.trees));
    const auto pr = load_tree(pr_tree_path(args.trees));
    cfg = predict_config(sr, pr, extract_features(dst, f));
    source = "auto";
  } else {
    cfg = hand_rule_config(f);
    source = "hand-rule";
  }

  ExecOptions exec;
  exec.workers = args.workers;
  exec.commit = args.commit;
  std::vector<T> w(g.weight.begin(), g.weight.end());
  if (g.weighted() && op.kind() != ReduceKind::Sum) {
    throw std::invalid_argument("weighted graphs support --op sum only");
  }

  FeatureMatrix<T> y;
  std::vector<std::int64_t> times;
  const int reps = std::max(1, args.reps);
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    y = g.weighted() ? index_weight_segment_reduce<T>(g.src, dst, w, x, cfg, exec)
                     : index_segment_reduce<T>(g.src, dst, x, op, cfg, exec);
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::max<std::int64_t>(1, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count()));
  }
  std::sort(times.begin(), times.end());
  const auto median = times[times.size() / 2];

  if (!args.out.empty()) save_matrix(y, args.seed, args.out);
  if (!args.text_out.empty()) write_text(args.text_out, format_matrix_text(y));

  out << "graph\t" << args.graph << "\n"
      << "nodes\t" << g.num_nodes << "\n"
      << "edges\t" << g.size() << "\n"
      << "F\t" << f << "\n"
      << "op\t" << (g.weighted() ? std::string("weighted-sum") : std::string(to_string(op))) << "\n"
      << "element\t" << to_string(element_kind_of<T>::value) << "\n"
      << "config_source\t" << source << "\n"
      << "config\t" << format_config(cfg) << "\n"
      << "time_ns\t" << median << "\n"
      << "gflops\t" << fmt_double(gflops_from(static_cast<std::int64_t>(g.size()), f, median), 6) << "\n";
  if (!args.out.empty()) out << "output\t" << args.out << "\n";
  return 0;
}

struct VerifyTally {
  std::size_t checks = 0;
  std::size_t failures = 0;
};

template <typename T>
void verify_graph(const std::string& path, const EdgeList& g, const VerifyArgs& args, VerifyTally& tally,
                  std::ostream& out) {
  const auto dst = g.dst_index();
  ExecOptions exec;
  exec.workers = args.workers;
  const double rel = default_rel_tolerance<T>();
  const auto configs = [] {
    auto all = enumerate_configs(Schedule::SR);
    auto pr = enumerate_configs(Schedule::PR);
    all.insert(all.end(), pr.begin(), pr.end());
    return all;
  }();
  auto report = [&](const std::string& what, const std::string& detail) {
    if (++tally.failures <= 20) out << "MISMATCH\t" << path << "\t" << what << "\t" << detail << "\n";
  };

  for (std::int64_t f : args.feature_sizes) {
    const auto x = random_features<T>(static_cast<std::size_t>(g.num_nodes), static_cast<std::size_t>(f),
                                      mix_seed(args.seed, static_cast<std::uint64_t>(f)));
    if (g.weighted()) {
      const std::vector<T> w(g.weight.begin(), g.weight.end());
      const auto [expected, mag] = weighted_reference(g, x);
      for (const auto& cfg : configs) {
        ++tally.checks;
        const auto y = index_weight_segment_reduce<T>(g.src, dst, w, x, cfg, exec);
        if (auto bad = weighted_mismatch(expected, mag, y, rel)) {
          report("weighted F=" + std::to_string(f) + " " + format_config(cfg), *bad);
        }
      }
      continue;
    }
    for (ReduceOp op : {ReduceOp::sum(), ReduceOp::mean(), ReduceOp::max()}) {
      const auto expected = unweighted_reference(g, x, op);
      for (const auto& cfg : configs) {
        ++tally.checks;
        const auto y = index_segment_reduce<T>(g.src, dst, x, op, cfg, exec);
        if (auto bad = first_mismatch(expected, y, rel)) {
          report(std::string(to_string(op)) + " F=" + std::to_string(f) + " " + format_config(cfg), bad->describe());
        }
      }
    }
  }
}

template <typename T>
int check_output(const VerifyArgs& args, const EdgeList& g, const FeatureMatrix<T>& y, std::uint64_t seed,
                 std::ostream& out) {
  const ReduceOp op = parse_reduce_op(args.op);
  const auto x = input_features<T>(g, static_cast<std::int64_t>(y.cols()), args.features, seed);
  const double rel = default_rel_tolerance<T>();
  std::optional<std::string> bad;
  if (g.weighted()) {
    const auto [expected, mag] = weighted_reference(g, x);
    bad = weighted_mismatch(expected, mag, y, rel);
  } else if (auto m = first_mismatch(unweighted_reference(g, x, op), y, rel)) {
    bad = m->describe();
  }
  if (bad) {
    out << "MISMATCH\t" << args.check << "\t" << *bad << "\n";
    return 1;
  }
  out << "ok\t" << args.check << "\t" << y.rows() << "x" << y.cols() << " matches the serial reference\n";
  return 0;
}

}  // namespace

std::string sr_tree_path(const std::string& dir) { return (fs::path(dir) / "sr.tree").string(); }
std::string pr_tree_path(const std::string& dir) { return (fs::path(dir) / "pr.tree").string(); }

std::vector<std::string> expand_graph_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && is_graph_file(e.path())) found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

std::vector<std::string> load_dataset_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      (void)parse_dataset_id(line);
    } catch (const std::exception& e) {
      throw ParseError(path, n, e.what());
    }
    ids.push_back(line);
  }
  return ids;
}

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  if (args.out.empty()) throw std::invalid_argument("synth: --out is required");
  if (!args.graph.empty() || args.nodes > 0) {
    std::int64_t nodes = args.nodes, edges = args.edges;
    if (!args.graph.empty()) {
      const auto& shape = reference_graph_shape(args.graph);
      nodes = shape.nodes;
      edges = shape.edges;
    }
    if (nodes < 1 || edges < 1) throw std::invalid_argument("synth: need --nodes and --edges >= 1");
    const auto sg = synth_graph(nodes, edges, args.seed);
    EdgeList g{sg.src, sg.dst, {}, sg.num_nodes};
    write_text(args.out, "# segred synth graph version=" + std::string(kVersion) + " seed=" +
                             std::to_string(args.seed) + "\n" + format_tsv(g));
    out << "wrote\t" << args.out << "\t" << g.num_nodes << " nodes\t" << g.size() << " edges\n";
    return 0;
  }

  if (args.bases < 1 || args.variants < 0) throw std::invalid_argument("synth: --bases >= 1, --variants >= 0");
  if (args.min_segments < 1 || args.max_segments < args.min_segments || !(args.max_avg >= 1.0)) {
    throw std::invalid_argument("synth: need 1 <= --min-segments <= --max-segments and --max-avg >= 1");
  }
  std::mt19937_64 rng(mix_seed(args.seed, 0x5e9d));
  std::vector<std::pair<double, double>> grid;
  for (double s : default_scale_grid()) {
    for (double e : default_noise_grid()) grid.emplace_back(s, e);
  }

  std::string text = "# segred datasets version=" + std::string(kVersion) + " seed=" + std::to_string(args.seed) + "\n";
  std::size_t count = 0;
  const double lo = std::log(static_cast<double>(args.min_segments));
  const double hi = std::log(static_cast<double>(args.max_segments));
  for (int b = 0; b < args.bases; ++b) {
    const double t = args.bases == 1 ? 0.5 : static_cast<double>(b) / (args.bases - 1);
    DatasetId id;
    DatasetId::Synthetic syn;
    syn.dist = b % 2 == 0 ? LengthDistribution::uniform() : LengthDistribution::power_law(2.2);
    syn.segments = static_cast<std::int64_t>(std::llround(std::exp(lo + (hi - lo) * t)));
    // average segment length spans [1, max_avg] on a log scale; a golden-ratio
    // stride decorrelates it from the segment count
    const double u = std::fmod(0.5 + b * 0.6180339887498949, 1.0);
    syn.avg = std::round(std::exp(std::log(args.max_avg) * u) * 100.0) / 100.0;
    syn.seed = mix_seed(args.seed, static_cast<std::uint64_t>(b) + 1);
    id.synthetic = syn;
    text += format_dataset_id(id) + "\n";
    ++count;
    std::vector<std::size_t> picks(grid.size());
    for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
    std::shuffle(picks.begin(), picks.end(), rng);
    for (int v = 0; v < args.variants && v < static_cast<int>(picks.size()); ++v) {
      DatasetId aug = id;
      aug.augment = DatasetId::Augment{{grid[picks[v]].first, grid[picks[v]].second},
                                       mix_seed(syn.seed, static_cast<std::uint64_t>(v) + 1)};
      text += format_dataset_id(aug) + "\n";
      ++count;
    }
  }
  write_text(args.out, text);
  out << "wrote\t" << args.out << "\t" << count << " datasets\n";
  return 0;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
  if (args.db.empty()) throw std::invalid_argument("sweep: --db is required");
  if (args.inputs.empty()) throw std::invalid_argument("sweep: no inputs");
  if (args.feature_sizes.empty()) throw std::invalid_argument("sweep: --feature-size list is empty");

  const auto loader = graph_loader(args.format);
  std::vector<Dataset> datasets;
  for (const auto& in : expand_graph_inputs(args.inputs)) {
    if (is_graph_file(in)) {
      DatasetId id;
      id.graph_path = in;
      const auto text = format_dataset_id(id);
      datasets.push_back({text, loader(in)});
    } else {
      for (const auto& id : load_dataset_list(in)) datasets.push_back({id, materialize(id, loader)});
    }
  }

  PerfDB db;
  if (fs::exists(args.db)) {
    db = load_db(args.db);
    out << "resuming\t" << args.db << "\t" << db.size() << " records\n";
  } else {
    db.metadata().machine = machine_tag(args.machine);
    db.metadata().element_kind = args.element_kind;
    db.metadata().seed = args.seed;
    db.metadata().created_at = utc_timestamp();
    save_db(db, args.db);
  }
  if (db.metadata().element_kind != args.element_kind) {
    throw std::invalid_argument("sweep: " + args.db + " holds " + std::string(to_string(db.metadata().element_kind)) +
                                " timings; pass --element accordingly");
  }

  SweepOptions opts;
  opts.both_schedules = args.both_schedules;
  opts.reps = args.reps;
  opts.min_sample_ns = args.min_sample_ns;
  opts.workers = args.workers;
  opts.seed = db.metadata().seed;
  opts.element_kind = args.element_kind;
  opts.on_record = [&](const PerfRecord& r) { append_db_record(args.db, r); };

  std::size_t planned = 0;
  for (auto f : args.feature_sizes) planned += sweep_points_per_pair(f, opts) * datasets.size();
  out << "datasets\t" << datasets.size() << "\n"
      << "points\t" << planned << "\n";
  const auto added = sweep(datasets, args.feature_sizes, db, opts);
  out << "added\t" << added << "\n"
      << "records\t" << db.size() << "\n";
  return 0;
}

int cmd_train(const TrainArgs& args, std::ostream& out) {
  if (args.db.empty() || args.trees.empty()) throw std::invalid_argument("train: --db and --trees are required");
  const PerfDB db = load_db(args.db);
  if (db.empty()) throw std::invalid_argument("train: " + args.db + " has no records");

  auto [train, holdout] = holdout_split(db, args.holdout_every);
  if (holdout.empty()) {
    out << "note\tfewer than " << args.holdout_every << " datasets; training on all, no holdout report\n";
    train = db;
  }
  FitOptions fit;
  fit.max_depth = args.max_depth;
  fit.min_leaf = args.min_leaf;

  auto train_one = [&](Schedule s) {
    const auto set = top1_labels(train, s);
    if (set.rows.empty()) {
      throw std::invalid_argument("train: no " + std::string(to_string(s)) + " records; sweep feature sizes " +
                                  (s == Schedule::PR ? "<= 4" : "> 4") + " too");
    }
    return fit_tree(set, fit);
  };
  const TreeModel sr = train_one(Schedule::SR);
  const TreeModel pr = train_one(Schedule::PR);

  fs::create_directories(args.trees);
  save_tree(sr, sr_tree_path(args.trees), args.seed);
  save_tree(pr, pr_tree_path(args.trees), args.seed);
  out << "sr_tree\t" << sr_tree_path(args.trees) << "\tdepth=" << sr.depth() << "\tleaves=" << sr.leaf_count() << "\n"
      << "pr_tree\t" << pr_tree_path(args.trees) << "\tdepth=" << pr.depth() << "\tleaves=" << pr.leaf_count() << "\n";

  if (!holdout.empty()) {
    const auto loader = graph_loader(std::nullopt);
    std::map<std::string, SegmentedIndex> cache;
    SweepOptions sweep_opts;
    sweep_opts.seed = db.metadata().seed;
    sweep_opts.workers = args.workers;
    sweep_opts.element_kind = db.metadata().element_kind;
    OnDemandMeasure measure = [&](const std::string& id, std::int64_t f, const KernelConfig& cfg) {
      auto it = cache.find(id);
      if (it == cache.end()) it = cache.emplace(id, materialize(id, loader)).first;
      return measure_point({id, it->second}, f, cfg, sweep_opts).gflops;
    };
    const auto tree_report = evaluate_rules(holdout, sr, pr, measure);
    const auto hand_report =
        evaluate_predictor(holdout, [](const FeatureVector& fv) { return hand_rule_config(fv.feature_size); }, measure);
    const auto report_path = (fs::path(args.trees) / "report.tsv").string();
    write_text(report_path, format_report(tree_report));
    out << "holdout_groups\t" << tree_report.groups.size() << "\n"
        << "tree_geomean\t" << fmt_double(tree_report.geomean_ratio) << "\n"
        << "hand_rule_geomean\t" << fmt_double(hand_report.geomean_ratio) << "\n"
        << "report\t" << report_path << "\n";
  }
  return 0;
}

int cmd_codegen(const CodegenArgs& args, std::ostream& out) {
  if (args.trees.empty() || args.out.empty()) throw std::invalid_argument("codegen: --trees and --out are required");
  const auto sr = load_tree(sr_tree_path(args.trees));
  const auto pr = load_tree(pr_tree_path(args.trees));
  CodegenOptions opts;
  opts.seed = args.seed;
  write_text(args.out, codegen(sr, pr, opts));
  out << "wrote\t" << args.out << "\n";
  return 0;
}

int cmd_run(const RunArgs& args, std::ostream& out) {
  if (args.graph.empty()) throw std::invalid_argument("run: graph path is required");
  if (!args.config.empty() && args.auto_config) throw std::invalid_argument("run: --config and --auto are exclusive");
  if (args.auto_config && args.trees.empty()) throw std::invalid_argument("run: --auto needs --trees DIR");
  if (args.features.empty() && args.feature_size < 1) throw std::invalid_argument("run: --feature-size >= 1 required");
  const EdgeList g = load_graph(args.graph, args.format);
  return args.element_kind == ElementKind::F64 ? run_typed<double>(args, g, out) : run_typed<float>(args, g, out);
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
  const auto graphs = expand_graph_inputs(args.inputs);
  if (graphs.empty()) throw std::invalid_argument("verify: no graphs given");

  if (!args.check.empty()) {
    if (graphs.size() != 1) throw std::invalid_argument("verify --check takes exactly one graph");
    const EdgeList g = load_graph(graphs.front(), args.format);
    MatrixFile file = load_matrix(args.check);
    if (auto* y = std::get_if<FeatureMatrix<float>>(&file.data)) return check_output(args, g, *y, file.seed, out);
    return check_output(args, g, std::get<FeatureMatrix<double>>(file.data), file.seed, out);
  }

  VerifyTally tally;
  for (const auto& path : graphs) {
    const EdgeList g = load_graph(path, args.format);
    const auto before = tally.failures;
    verify_graph<double>(path, g, args, tally, out);
    out << (tally.failures == before ? "ok" : "FAIL") << "\t" << path << "\t" << g.num_nodes << " nodes\t"
        << g.size() << " edges\n";
  }
  out << "checks\t" << tally.checks << "\n"
      << "failures\t" << tally.failures << "\n";
  return tally.failures == 0 ? 0 : 1;
}

}  // namespace segred::cli
