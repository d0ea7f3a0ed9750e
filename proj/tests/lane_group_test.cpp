#include <gtest/gtest.h>

#include <random>

#include "segred/lane_group.hpp"

namespace segred {
namespace {

LaneRegister<index_t> keys_of(std::initializer_list<index_t> ks) {
  LaneRegister<index_t> r{};
  int i = 0;
  for (auto k : ks) r[i++] = k;
  return r;
}

TEST(LaneGroup, ShuffleDownReadsHigherLanes) {
  LaneGroup g(8);
  LaneRegister<int> v{};
  for (int r = 0; r < 8; ++r) v[r] = 10 * r;
  const auto d = g.shuffle_down(v, 3);
  for (int r = 0; r < 5; ++r) EXPECT_EQ(d[r], 10 * (r + 3));
  EXPECT_TRUE(g.shuffle_down_valid(4, 3));
  EXPECT_FALSE(g.shuffle_down_valid(5, 3));
}

TEST(LaneGroup, ShuffleUpReadsLowerLanes) {
  LaneGroup g(8);
  LaneRegister<int> v{};
  for (int r = 0; r < 8; ++r) v[r] = r + 1;
  const auto u = g.shuffle_up(v, 1);
  for (int r = 1; r < 8; ++r) EXPECT_EQ(u[r], r);
  EXPECT_FALSE(g.shuffle_up_valid(0, 1));
  EXPECT_TRUE(g.shuffle_up_valid(1, 1));
}

TEST(LaneGroup, SizeBounds) {
  EXPECT_THROW(LaneGroup(0), std::invalid_argument);
  EXPECT_THROW(LaneGroup(33), std::invalid_argument);
  EXPECT_EQ(LaneGroup(32).all_lanes(), 0xffffffffu);
  EXPECT_EQ(LaneGroup(8).all_lanes(), 0xffu);
}

TEST(SegmentedShuffle, SingleRunHeadCommitsWholeGroup) {
  LaneGroup g(8);
  const auto keys = keys_of({5, 5, 5, 5, 5, 5, 5, 5});
  LaneRegister<int> v{};
  for (int r = 0; r < 8; ++r) v[r] = 1;
  EXPECT_EQ(segment_heads(g, keys), 0b1u);
  segmented_shuffle_reduce(g, keys, v, [](int a, int b) { return a + b; });
  EXPECT_EQ(v[0], 8);
}

TEST(SegmentedShuffle, MixedRunsGiveRunTotalsAtHeads) {
  LaneGroup g(8);
  const auto keys = keys_of({0, 0, 1, 1, 1, 2, 3, 3});
  LaneRegister<int> v{};
  for (int r = 0; r < 8; ++r) v[r] = r + 1;
  const LaneMask heads = segment_heads(g, keys);
  EXPECT_EQ(heads, (1u << 0) | (1u << 2) | (1u << 5) | (1u << 6));
  segmented_shuffle_reduce(g, keys, v, [](int a, int b) { return a + b; });
  EXPECT_EQ(v[0], 3);
  EXPECT_EQ(v[2], 12);
  EXPECT_EQ(v[5], 6);
  EXPECT_EQ(v[6], 15);
}

// The run-based plan must agree with the general shuffle-derived plan for
// every contiguous-run key layout, including a masked tail.
TEST(SegmentedShuffle, RunPlanMatchesGeneralPlan) {
  std::mt19937_64 rng(3);
  for (int g_t : {2, 4, 8, 16, 32}) {
    LaneGroup g(g_t);
    for (int trial = 0; trial < 2000; ++trial) {
      LaneRegister<index_t> keys{};
      index_t k = 0;
      const int live = 1 + static_cast<int>(rng() % static_cast<unsigned>(g_t));
      for (int r = 0; r < g_t; ++r) {
        if (r >= live) {
          keys[r] = -1;
          continue;
        }
        if (rng() % 3 == 0) k += 1 + static_cast<index_t>(rng() % 3);
        keys[r] = k;
      }
      const auto general = plan_segmented_shuffle(g, keys);
      const LaneMask adj = adjacent_equal(g, keys);
      const auto runs = plan_segmented_shuffle_runs(g, adj);
      ASSERT_EQ(general.steps, runs.steps);
      for (int s = 0; s < general.steps; ++s) ASSERT_EQ(general.accept[s], runs.accept[s]) << "G_t=" << g_t;
      ASSERT_EQ(segment_heads(g, keys), segment_heads_runs(g, adj));
    }
  }
}

}  // namespace
}  // namespace segred
