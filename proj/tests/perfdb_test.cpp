#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "segred/benchmark.hpp"
#include "segred/dataset_id.hpp"
#include "segred/features.hpp"
#include "segred/perfdb.hpp"
#include "segred/sweep.hpp"
#include "segred/synth.hpp"

namespace segred {
namespace {

/// Sorted index stand-in that counts element reads.
struct CountingIndex {
  std::size_t n = 0;
  mutable std::vector<std::size_t> reads;
  std::size_t size() const { return n; }
  index_t operator[](std::size_t i) const {
    reads.push_back(i);
    return static_cast<index_t>(i / 4);
  }
};

TEST(Features, ReadsOnlyLengthAndLastElement) {
  for (std::size_t n : {1u, 4u, 1000u, 10'000'000u}) {
    CountingIndex idx{n, {}};
    const auto fv = extract_features(idx, 32);
    ASSERT_EQ(idx.reads, std::vector<std::size_t>{n - 1});
    EXPECT_EQ(fv.idx_size, static_cast<std::int64_t>(n));
    EXPECT_EQ(fv.idx_max, static_cast<std::int64_t>((n - 1) / 4 + 1));
  }
}

TEST(Features, ReferenceShapes) {
  auto fv = extract_features(SegmentedIndex(std::vector<index_t>(10556, 2707)), 32);
  EXPECT_EQ(fv.idx_size, 10556);
  EXPECT_EQ(fv.idx_max, 2708);
  EXPECT_NEAR(fv.avg, 3.898, 5e-4);
  fv = extract_features(SegmentedIndex(std::vector<index_t>(9104, 3326)), 1);
  EXPECT_NEAR(fv.avg, 2.736, 5e-4);
  fv = extract_features(SegmentedIndex({0, 1, 2, 3}), 8);
  EXPECT_EQ(fv, (FeatureVector{4, 4, 1.0, 8}));
  EXPECT_THROW(extract_features(SegmentedIndex({}, 2), 1), std::invalid_argument);
  EXPECT_THROW(extract_features(SegmentedIndex({0}), 0), std::invalid_argument);
}

TEST(Synth, UniformSmallCase) {
  const auto idx = synth_index(4, 2.0, LengthDistribution::uniform(), 99);
  EXPECT_EQ(idx.size(), 8u);
  EXPECT_LE(idx.back(), 3);
  EXPECT_EQ(idx.out_rows(), 4);
  EXPECT_EQ(idx, synth_index(4, 2.0, LengthDistribution::uniform(), 99));
}

TEST(Synth, PowerLawMeanNearTarget) {
  const auto idx = synth_index(10'000, 5.0, LengthDistribution::power_law(2.0), 3);
  const double mean = static_cast<double>(idx.size()) / 10'000.0;
  EXPECT_NEAR(mean, 5.0, 0.5);
}

TEST(Synth, RejectsBadParameters) {
  EXPECT_THROW(synth_index(0, 1.0, LengthDistribution::uniform(), 1), std::invalid_argument);
  EXPECT_THROW(synth_index(3, -1.0, LengthDistribution::uniform(), 1), std::invalid_argument);
  EXPECT_THROW(synth_index(3, 1.0, LengthDistribution::power_law(1.0), 1), std::invalid_argument);
  EXPECT_THROW(parse_distribution("powerlaw:0.5"), std::invalid_argument);
  EXPECT_THROW(parse_distribution("normal"), std::invalid_argument);
  EXPECT_EQ(parse_distribution("powerlaw:2.2"), LengthDistribution::power_law(2.2));
  EXPECT_EQ(to_string(LengthDistribution::power_law(2.2)), "powerlaw:2.2");
}

TEST(Synth, LengthsRoundTrip) {
  const SegmentedIndex idx({1, 1, 3, 3, 3}, 4);
  EXPECT_EQ(segment_lengths(idx), (std::vector<std::int64_t>{0, 2, 0, 3}));
  EXPECT_EQ(index_from_lengths({0, 2, 0, 3}), SegmentedIndex({1, 1, 3, 3, 3}, 4));
}

TEST(Augment, IdentityKeepsHistogram) {
  const auto base = synth_index(300, 4.0, LengthDistribution::power_law(2.0), 7);
  const auto same = augment_index(base, {1.0, 0.0}, 5);
  auto a = segment_lengths(base);
  auto b = segment_lengths(same);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
}

TEST(Augment, ScaleTwoDoublesSegments) {
  const auto base = synth_index(300, 4.0, LengthDistribution::uniform(), 7);
  const auto big = augment_index(base, {2.0, 0.0}, 5);
  EXPECT_NEAR(static_cast<double>(big.idx_max()), 2.0 * static_cast<double>(base.idx_max()), 1.0);
}

TEST(Augment, GridOutputsAreValidIndices) {
  const auto base = synth_index(200, 3.0, LengthDistribution::power_law(2.5), 8);
  const auto all = augment_dataset(base, default_scale_grid(), default_noise_grid(), 17);
  ASSERT_EQ(all.size(), 60u);
  for (const auto& idx : all) {
    ASSERT_FALSE(idx.empty());
    EXPECT_TRUE(std::is_sorted(idx.values().begin(), idx.values().end()));
    EXPECT_LT(idx.back(), idx.out_rows());
    EXPECT_GE(idx.values().front(), 0);
    EXPECT_NO_THROW(SegmentedIndex(std::vector<index_t>(idx.values().begin(), idx.values().end()), idx.out_rows()));
  }
  EXPECT_THROW(augment_index(base, {0.0, 0.1}, 1), std::invalid_argument);
  EXPECT_THROW(augment_index(SegmentedIndex({}, 3), {1.0, 0.1}, 1), std::invalid_argument);
}

TEST(Synth, ReferenceGraphShape) {
  const auto& cora = reference_graph_shape("cora");
  EXPECT_EQ(cora.nodes, 2708);
  EXPECT_EQ(cora.edges, 10556);
  const auto g = synth_graph(cora.nodes, cora.edges, 1);
  EXPECT_EQ(g.dst.size(), 10556u);
  EXPECT_TRUE(std::is_sorted(g.dst.begin(), g.dst.end()));
  for (auto s : g.src) ASSERT_LT(s, 2708);
  EXPECT_THROW(reference_graph_shape("nope"), std::invalid_argument);
}

TEST(DatasetId, RoundTripAndMaterialize) {
  const std::string text = "synth(dist=powerlaw:2.2,segments=500,avg=3.5,seed=4)+aug(scale=1.5,noise=0.1,seed=9)";
  const auto id = parse_dataset_id(text);
  EXPECT_EQ(format_dataset_id(id), text);
  ASSERT_TRUE(id.synthetic);
  EXPECT_EQ(id.synthetic->segments, 500);
  ASSERT_TRUE(id.augment);
  EXPECT_EQ(id.augment->params.scale, 1.5);
  const auto idx = materialize(text);
  EXPECT_EQ(idx, augment_index(synth_index(500, 3.5, LengthDistribution::power_law(2.2), 4), {1.5, 0.1}, 9));
  EXPECT_EQ(idx, materialize(text));
}

TEST(DatasetId, GraphBaseNeedsLoader) {
  const auto id = parse_dataset_id("graph(data/x.tsv)");
  EXPECT_EQ(id.graph_path, "data/x.tsv");
  EXPECT_THROW(materialize(id), std::invalid_argument);
  const auto idx = materialize(id, [](const std::string& p) {
    EXPECT_EQ(p, "data/x.tsv");
    return SegmentedIndex({0, 0, 2}, 3);
  });
  EXPECT_EQ(idx.size(), 3u);
}

TEST(DatasetId, MalformedInputs) {
  for (const char* bad : {"", "synth(dist=uniform,segments=5,avg=1)", "synth(dist=uniform,segments=x,avg=1,seed=1)",
                          "foo(1)", "graph()", "synth(dist=uniform,segments=5,avg=1,seed=1)+aug(scale=1,noise=0",
                          "synth(dist=uniform,segments=5,avg=1,seed=1,seed=2)"}) {
    EXPECT_THROW(parse_dataset_id(bad), std::invalid_argument) << bad;
  }
}

TEST(DatasetId, FormatRealRoundTrips) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
  EXPECT_EQ(format_real(1.15), "1.15");
  EXPECT_EQ(format_real(6413.5), "6413.5");
}

PerfRecord sample_record(const std::string& id, std::int64_t f, KernelConfig cfg, double gflops) {
  PerfRecord r;
  r.dataset_id = id;
  r.features = FeatureVector{100, 25, 4.0, f};
  r.config = cfg;
  r.gflops = gflops;
  r.time_ns = 1234;
  r.reps = 3;
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("segred_test_" + name)).string();
}

TEST(PerfDb, InsertRejectsDuplicateKeys) {
  PerfDB db;
  const KernelConfig cfg{Schedule::SR, 32, 1, 8, 1, 1};
  EXPECT_TRUE(db.insert(sample_record("a", 32, cfg, 1.0)));
  EXPECT_FALSE(db.insert(sample_record("a", 32, cfg, 2.0)));
  EXPECT_TRUE(db.insert(sample_record("a", 64, cfg, 2.0)));
  EXPECT_EQ(db.size(), 2u);
  EXPECT_EQ(db.find({"a", 32, cfg})->gflops, 1.0);
  EXPECT_EQ(db.find({"b", 32, cfg}), nullptr);
}

TEST(PerfDb, SaveLoadRoundTrip) {
  DbMetadata meta;
  meta.machine = "box";
  meta.element_kind = ElementKind::F64;
  meta.seed = 42;
  meta.created_at = "2026-01-01T00:00:00Z";
  PerfDB db(meta);
  db.insert(sample_record("synth(dist=uniform,segments=4,avg=2,seed=1)", 1, {Schedule::PR, 16, 2, 16, 1, 8}, 0.125));
  db.insert(sample_record("graph(a b.tsv)", 32, {Schedule::SR, 64, 8, 64, 4, 1}, 3.0000000000000004));
  const auto path = temp_path("roundtrip.db");
  save_db(db, path);
  EXPECT_EQ(load_db(path), db);
  std::remove(path.c_str());
}

TEST(PerfDb, HeaderOnlyLoadsEmpty) {
  PerfDB db;
  const auto path = temp_path("empty.db");
  save_db(db, path);
  const auto loaded = load_db(path);
  EXPECT_TRUE(loaded.empty());
  EXPECT_EQ(loaded.metadata(), db.metadata());
  std::remove(path.c_str());
}

TEST(PerfDb, TruncatedLineReportsLineNumber) {
  PerfDB db;
  db.insert(sample_record("a", 1, {Schedule::PR, 16, 2, 16, 1, 8}, 1.0));
  db.insert(sample_record("b", 1, {Schedule::PR, 16, 2, 16, 1, 8}, 1.0));
  std::string text = format_db_header(db.metadata()) + "\n" + format_db_record(db.records()[0]) + "\n" +
                     format_db_record(db.records()[1]);
  text.resize(text.size() - 10);
  try {
    parse_db(text, "t.db");
    FAIL() << "truncated DB parsed";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_db(""), ParseError);
}

TEST(PerfDb, RejectsInvalidRecords) {
  const std::string header = format_db_header(DbMetadata{}) + "\n";
  auto bad_cfg = sample_record("a", 1, {Schedule::PR, 16, 2, 8, 1, 16}, 1.0);
  EXPECT_THROW(parse_db(header + format_db_record(bad_cfg) + "\n"), ParseError);
  auto bad_reps = sample_record("a", 1, {Schedule::PR, 16, 2, 16, 1, 8}, 1.0);
  bad_reps.reps = 2;
  EXPECT_THROW(parse_db(header + format_db_record(bad_reps) + "\n"), ParseError);
  const auto ok = sample_record("a", 1, {Schedule::PR, 16, 2, 16, 1, 8}, 1.0);
  EXPECT_THROW(parse_db(header + format_db_record(ok) + "\n" + format_db_record(ok) + "\n"), ParseError);
}

TEST(PerfDb, AppendExtendsFile) {
  PerfDB db;
  const auto path = temp_path("append.db");
  save_db(db, path);
  const auto rec = sample_record("a", 4, {Schedule::PR, 16, 2, 16, 1, 8}, 1.0);
  append_db_record(path, rec);
  const auto loaded = load_db(path);
  ASSERT_EQ(loaded.size(), 1u);
  EXPECT_EQ(loaded.records()[0], rec);
  std::remove(path.c_str());
}

TEST(Benchmark, GflopsFormula) {
  EXPECT_DOUBLE_EQ(gflops_from(1000, 32, 32'000), 1.0);
  EXPECT_THROW(gflops_from(1, 1, 0), std::invalid_argument);
}

// With a fake clock each sample takes `step` ticks, so doubling the step
// must halve the reported throughput exactly.
TEST(Benchmark, FakeClockDoublingTimeHalvesGflops) {
  const SegmentedIndex idx({0, 0, 1, 2, 2, 2}, 3);
  const auto x = random_features<float>(6, 4, 1);
  auto run = [&](std::int64_t step) {
    std::int64_t now = 0;
    BenchOptions opts;
    opts.min_sample_ns = 0;
    opts.reps = 5;
    opts.clock = [&] { return now += step; };
    return benchmark_kernel(idx, x, ReduceOp::sum(), KernelConfig{Schedule::PR, 16, 1, 8, 1, 8}, opts);
  };
  const auto a = run(1000);
  const auto b = run(2000);
  EXPECT_EQ(b.time_ns, 2 * a.time_ns);
  EXPECT_DOUBLE_EQ(a.gflops, 2.0 * b.gflops);
  EXPECT_EQ(a.reps, 5);
  EXPECT_EQ(a.features, extract_features(idx, 4));
}

TEST(Benchmark, RealClockAndValidation) {
  const auto idx = synth_index(200, 4.0, LengthDistribution::uniform(), 2);
  const auto x = random_features<double>(idx.size(), 8, 3);
  TimingSummary summary;
  BenchOptions opts;
  opts.min_sample_ns = 10'000;
  const auto rec = benchmark_kernel(idx, x, ReduceOp::max(), hand_rule_config(8), opts, &summary);
  EXPECT_GT(rec.gflops, 0.0);
  EXPECT_GT(rec.time_ns, 0);
  EXPECT_EQ(summary.median_ns, rec.time_ns);
  EXPECT_GE(summary.cv, 0.0);
  EXPECT_THROW(benchmark_kernel(idx, x, ReduceOp::sum(), KernelConfig{Schedule::SR, 32, 8, 4, 1, 1}, opts),
               std::invalid_argument);
  opts.reps = 2;
  EXPECT_THROW(benchmark_kernel(idx, x, ReduceOp::sum(), hand_rule_config(8), opts), std::invalid_argument);
}

TEST(Benchmark, InterleavedReturnsInputOrder) {
  const auto idx = synth_index(100, 3.0, LengthDistribution::uniform(), 2);
  const auto x = random_features<float>(idx.size(), 2, 3);
  const auto configs = enumerate_configs(Schedule::PR);
  const std::vector<KernelConfig> some(configs.begin(), configs.begin() + 7);
  BenchOptions opts;
  opts.min_sample_ns = 0;
  const auto recs = benchmark_interleaved(idx, x, ReduceOp::sum(), some, opts);
  ASSERT_EQ(recs.size(), some.size());
  for (std::size_t i = 0; i < some.size(); ++i) EXPECT_EQ(recs[i].config, some[i]);
}

std::vector<Dataset> two_datasets() {
  std::vector<Dataset> out;
  for (const char* id : {"synth(dist=uniform,segments=20,avg=3,seed=1)", "synth(dist=powerlaw:2,segments=30,avg=2,seed=2)"}) {
    out.push_back({id, materialize(id)});
  }
  return out;
}

TEST(Sweep, RecordCountMatchesConfigSpaces) {
  SweepOptions opts;
  opts.reps = 3;
  opts.min_sample_ns = 0;
  PerfDB db;
  const auto added = sweep(two_datasets(), {1, 32}, db, opts);
  EXPECT_EQ(added, (324u + 144u) * 2u);
  EXPECT_EQ(db.size(), added);
  EXPECT_EQ(sweep_points_per_pair(1, opts), 324u);
  EXPECT_EQ(sweep_points_per_pair(32, opts), 144u);
  for (const auto& r : db.records()) {
    EXPECT_TRUE(validate_config(r.config).empty());
    EXPECT_EQ(r.config.schedule, default_schedule(r.features.feature_size));
    EXPECT_EQ(r.features, extract_features(materialize(r.dataset_id), r.features.feature_size));
  }
  opts.both_schedules = true;
  EXPECT_EQ(sweep_points_per_pair(1, opts), 468u);
}

TEST(Sweep, ResumeSkipsExistingKeys) {
  SweepOptions opts;
  opts.reps = 3;
  opts.min_sample_ns = 0;
  CandidateSets small;
  small.t_n = {16};
  small.t_m = {1};
  opts.candidates = small;
  PerfDB db;
  const auto ds = two_datasets();
  std::size_t calls = 0;
  opts.on_record = [&](const PerfRecord&) {
    if (++calls == 5) throw std::runtime_error("interrupted");
  };
  EXPECT_THROW(sweep(ds, {2, 16}, db, opts), std::runtime_error);
  EXPECT_EQ(db.size(), 5u);
  opts.on_record = nullptr;
  const auto added = sweep(ds, {2, 16}, db, opts);
  const std::size_t total = 2 * (sweep_points_per_pair(2, opts) + sweep_points_per_pair(16, opts));
  EXPECT_EQ(added + 5, total);
  std::set<PerfDB::Key> keys;
  for (const auto& r : db.records()) EXPECT_TRUE(keys.insert(PerfDB::key_of(r)).second);
  EXPECT_EQ(sweep(ds, {2, 16}, db, opts), 0u);
}

TEST(Sweep, RejectsEmptyInputs) {
  PerfDB db;
  EXPECT_THROW(sweep(two_datasets(), {}, db), std::invalid_argument);
  EXPECT_THROW(sweep({}, {1}, db), std::invalid_argument);
}

}  // namespace
}  // namespace segred
