#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "segred/tree.hpp"
#include "tree_fixtures.hpp"

namespace generated {

// Kernel stubs the emitted header calls: record which instantiation ran.
inline segred::KernelConfig chosen;

template <int Nt, int TN, int Mt, int TM, typename Idx, typename Mat>
void segreduce_sr(const Idx&, const Mat&, Mat&) {
  chosen = {segred::Schedule::SR, TN, TM, Mt, Nt, 1};
}

template <int Nt, int TN, int Mt, int TM, int Gt, typename Idx, typename Mat>
void segreduce_pr(const Idx&, const Mat&, Mat&) {
  chosen = {segred::Schedule::PR, TN, TM, Mt, Nt, Gt};
}

#include "generated_dispatch.hpp"

}  // namespace generated

namespace segred {
namespace {

KernelConfig compiled_dispatch(const FeatureVector& fv) {
  int idx = 0;
  int x = 0;
  int y = 0;
  generated::chosen = {};
  generated::dispatch(idx, x, y, fv.avg, static_cast<double>(fv.idx_size), static_cast<double>(fv.feature_size));
  return generated::chosen;
}

TEST(CodegenCompiled, AgreesWithPredictOnRandomAndBoundaryVectors) {
  const auto sr = testing::fitted_tree(Schedule::SR, 21);
  const auto pr = testing::fitted_tree(Schedule::PR, 22);
  std::mt19937_64 rng(9);
  std::size_t checked = 0;
  for (int i = 0; i < 1000; ++i) {
    FeatureVector fv;
    fv.idx_size = 1 + static_cast<std::int64_t>(rng() % 8'000'000);
    fv.idx_max = 1 + static_cast<std::int64_t>(rng() % 200'000);
    fv.avg = static_cast<double>(rng() % 4500) / 100.0;
    fv.feature_size = 1 + static_cast<std::int64_t>(rng() % 128);
    ASSERT_EQ(compiled_dispatch(fv), predict_config(sr, pr, fv));
    ++checked;
  }
  for (const auto* tree : {&sr, &pr}) {
    for (const auto& node : tree->nodes()) {
      if (node.is_leaf || node.feature != TreeFeature::Avg) continue;
      for (double v : {node.threshold, std::nextafter(node.threshold, 1e300)}) {
        const FeatureVector fv{1000, 100, v, tree == &sr ? 32 : 2};
        ASSERT_EQ(compiled_dispatch(fv), predict_config(sr, pr, fv));
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000u);
}

}  // namespace
}  // namespace segred
