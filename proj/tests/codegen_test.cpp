#include <gtest/gtest.h>

#include <random>

#include "dispatch_interpreter.hpp"
#include "segred/codegen.hpp"
#include "segred/evaluate.hpp"
#include "tree_fixtures.hpp"

namespace segred {
namespace {

const KernelConfig kPr{Schedule::PR, 16, 4, 32, 1, 32};

TEST(Codegen, TwoSplitTreeControlShape) {
  const auto text = codegen(testing::two_split_tree(), TreeModel::single_leaf(kPr));
  const std::string expected_sr =
      "// <Nt, TN, Mt, TM>\n"
      "// Gt=1 for SR\n"
      "template <typename Idx, typename Mat>\n"
      "inline void dispatch_sr(const Idx& idx, const Mat& X, Mat& Y, [[maybe_unused]] double avg,\n"
      "    [[maybe_unused]] double idx_size, [[maybe_unused]] double F) {\n"
      "    if (avg <= 1.15) {\n"
      "        segreduce_sr<1, 32, 4, 8>(idx, X, Y);\n"
      "    } else {\n"
      "        if (idx_size <= 6413.5) {\n"
      "            segreduce_sr<1, 32, 4, 8>(idx, X, Y);\n"
      "        } else {\n"
      "            segreduce_sr<1, 64, 8, 4>(idx, X, Y);\n"
      "        }\n"
      "    }\n"
      "}\n";
  EXPECT_NE(text.find(expected_sr), std::string::npos) << text;
  EXPECT_NE(text.find("    segreduce_pr<1, 16, 32, 4, 32>(idx, X, Y);\n}\n"), std::string::npos) << text;
  EXPECT_NE(text.find("#pragma once"), std::string::npos);
}

TEST(Codegen, SingleLeafIsUnconditional) {
  const KernelConfig sr{Schedule::SR, 32, 4, 16, 1, 1};
  const auto text = codegen(TreeModel::single_leaf(sr), TreeModel::single_leaf(kPr));
  const auto begin = text.find("inline void dispatch_sr(");
  const auto end = text.find("\n}\n", begin);
  const auto body = text.substr(begin, end - begin);
  EXPECT_EQ(body.find("if ("), std::string::npos);
  EXPECT_NE(body.find("segreduce_sr<1, 32, 16, 4>(idx, X, Y);"), std::string::npos);
}

TEST(Codegen, Deterministic) {
  const auto sr = testing::fitted_tree(Schedule::SR, 3);
  const auto pr = testing::fitted_tree(Schedule::PR, 4);
  EXPECT_EQ(codegen(sr, pr, {5}), codegen(sr, pr, {5}));
  EXPECT_NE(codegen(sr, pr, {5}).find("(seed=5)"), std::string::npos);
}

// Every threshold in both trees, plus neighbours on each side, is probed
// alongside random vectors.
TEST(Codegen, InterpretedSourceAgreesWithPredict) {
  const auto sr = testing::fitted_tree(Schedule::SR, 21);
  const auto pr = testing::fitted_tree(Schedule::PR, 22);
  const testing::DispatchInterpreter interp(codegen(sr, pr));
  std::mt19937_64 rng(5);
  std::vector<FeatureVector> probes;
  for (int i = 0; i < 1000; ++i) {
    FeatureVector fv;
    fv.idx_size = 1 + static_cast<std::int64_t>(rng() % 8'000'000);
    fv.idx_max = 1 + static_cast<std::int64_t>(rng() % 200'000);
    fv.avg = static_cast<double>(rng() % 4500) / 100.0;
    fv.feature_size = 1 + static_cast<std::int64_t>(rng() % 128);
    probes.push_back(fv);
  }
  for (const auto* tree : {&sr, &pr}) {
    for (const auto& node : tree->nodes()) {
      if (node.is_leaf) continue;
      for (double v : {node.threshold, std::nextafter(node.threshold, 1e300), std::nextafter(node.threshold, -1e300)}) {
        FeatureVector fv = probes[probes.size() % 97];
        if (node.feature == TreeFeature::Avg) fv.avg = v;
        if (node.feature == TreeFeature::IdxSize) fv.idx_size = static_cast<std::int64_t>(std::floor(v));
        if (node.feature == TreeFeature::F) fv.feature_size = static_cast<std::int64_t>(std::floor(v));
        fv.feature_size = std::max<std::int64_t>(fv.feature_size, 1);
        if (tree == &sr && fv.feature_size <= 4) fv.feature_size = 5;
        probes.push_back(fv);
      }
    }
  }
  for (const auto& fv : probes) ASSERT_EQ(interp.dispatch(fv), predict_config(sr, pr, fv));
}

PerfRecord rec(const std::string& id, std::int64_t f, KernelConfig cfg, double gflops) {
  PerfRecord r;
  r.dataset_id = id;
  r.features = FeatureVector{100, 50, 2.0, f};
  r.config = cfg;
  r.gflops = gflops;
  r.time_ns = 10;
  r.reps = 3;
  return r;
}

const KernelConfig kA{Schedule::SR, 16, 1, 8, 1, 1};
const KernelConfig kB{Schedule::SR, 32, 1, 8, 1, 1};

TEST(Evaluate, WorstOfTwoGivesHalf) {
  PerfDB db;
  db.insert(rec("d", 32, kA, 1.0));
  db.insert(rec("d", 32, kB, 2.0));
  const auto report = evaluate_rules(db, TreeModel::single_leaf(kA), TreeModel::single_leaf(kPr));
  ASSERT_EQ(report.groups.size(), 1u);
  EXPECT_DOUBLE_EQ(report.groups[0].ratio, 0.5);
  EXPECT_DOUBLE_EQ(report.geomean_ratio, 0.5);
  EXPECT_EQ(report.groups[0].best, kB);
}

TEST(Evaluate, PerfectPredictorGivesOne) {
  PerfDB db;
  db.insert(rec("d", 32, kA, 1.0));
  db.insert(rec("d", 32, kB, 2.0));
  db.insert(rec("e", 32, kA, 3.0));
  db.insert(rec("e", 32, kB, 2.0));
  const auto report = evaluate_predictor(db, [&](const FeatureVector&) { return kB; });
  EXPECT_NEAR(report.geomean_ratio, std::sqrt(2.0 / 3.0), 1e-12);
  const auto exact = evaluate_predictor(db, [&, i = 0](const FeatureVector&) mutable { return i++ ? kA : kB; });
  EXPECT_DOUBLE_EQ(exact.geomean_ratio, 1.0);
}

TEST(Evaluate, OnDemandMeasurement) {
  PerfDB db;
  db.insert(rec("d", 32, kB, 2.0));
  EXPECT_THROW(evaluate_predictor(db, [](const FeatureVector&) { return kA; }), std::invalid_argument);
  int calls = 0;
  const auto report = evaluate_predictor(
      db, [](const FeatureVector&) { return kA; },
      [&](const std::string& id, std::int64_t f, const KernelConfig& cfg) {
        ++calls;
        EXPECT_EQ(id, "d");
        EXPECT_EQ(f, 32);
        EXPECT_EQ(cfg, kA);
        return 1.5;
      });
  EXPECT_EQ(calls, 1);
  EXPECT_TRUE(report.groups[0].measured_on_demand);
  EXPECT_DOUBLE_EQ(report.geomean_ratio, 0.75);
  EXPECT_NE(format_report(report).find("geomean_ratio\t0.7500"), std::string::npos);
}

TEST(Evaluate, HoldoutSplitIsByDatasetId) {
  PerfDB db;
  for (int d = 0; d < 8; ++d) {
    db.insert(rec("d" + std::to_string(d), 32, kA, 1.0));
    db.insert(rec("d" + std::to_string(d), 64, kA, 1.0));
  }
  const auto [train, holdout] = holdout_split(db, 4);
  EXPECT_EQ(holdout.size(), 4u);
  EXPECT_EQ(train.size(), 12u);
  for (const auto& r : holdout.records()) {
    for (const auto& t : train.records()) ASSERT_NE(r.dataset_id, t.dataset_id);
  }
  EXPECT_THROW(holdout_split(db, 1), std::invalid_argument);
  EXPECT_THROW(evaluate_predictor(PerfDB{}, [](const FeatureVector&) { return kA; }), std::invalid_argument);
}

}  // namespace
}  // namespace segred
