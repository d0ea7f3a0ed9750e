#pragma once

// Independent reference implementations and input generators shared by the
// unit tests and the acceptance binary. Nothing here calls the kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "segred/feature_matrix.hpp"
#include "segred/reduce_op.hpp"
#include "segred/segmented_index.hpp"
#include "segred/synth.hpp"

namespace segred::testing {

/// Brute force: for every output row, scan all of idx. Ascending m, so sums
/// fold in the same order as the library oracle.
template <typename T>
FeatureMatrix<T> scan_reduce(const std::vector<index_t>& idx, index_t out_rows, const FeatureMatrix<T>& x,
                             ReduceKind kind, bool empty_max_as_zero = true) {
  FeatureMatrix<T> y(static_cast<std::size_t>(out_rows), x.cols());
  for (index_t i = 0; i < out_rows; ++i) {
    for (std::size_t n = 0; n < x.cols(); ++n) {
      T acc = kind == ReduceKind::Max ? -std::numeric_limits<T>::infinity() : T(0);
      std::size_t count = 0;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        if (idx[m] != i) continue;
        acc = kind == ReduceKind::Max ? std::max(acc, x(m, n)) : acc + x(m, n);
        ++count;
      }
      if (kind == ReduceKind::Mean && count > 0) acc /= static_cast<T>(count);
      if (kind == ReduceKind::Max && count == 0 && empty_max_as_zero) acc = T(0);
      y(static_cast<std::size_t>(i), n) = acc;
    }
  }
  return y;
}

/// Dense A * X where A[dst[m]][src[m]] += w[m].
inline FeatureMatrix<double> dense_matmul(const std::vector<index_t>& src, const std::vector<index_t>& dst,
                                          const std::vector<double>& w, index_t rows, const FeatureMatrix<double>& x) {
  std::vector<double> a(static_cast<std::size_t>(rows) * x.rows(), 0.0);
  for (std::size_t m = 0; m < src.size(); ++m) {
    a[static_cast<std::size_t>(dst[m]) * x.rows() + static_cast<std::size_t>(src[m])] += w[m];
  }
  FeatureMatrix<double> y(static_cast<std::size_t>(rows), x.cols());
  for (std::size_t i = 0; i < static_cast<std::size_t>(rows); ++i) {
    for (std::size_t k = 0; k < x.rows(); ++k) {
      const double aik = a[i * x.rows() + k];
      if (aik == 0.0) continue;
      for (std::size_t n = 0; n < x.cols(); ++n) y(i, n) += aik * x(k, n);
    }
  }
  return y;
}

/// Sum over |terms| for each output cell; scales tolerances when signs mix.
inline FeatureMatrix<double> dense_abs_matmul(const std::vector<index_t>& src, const std::vector<index_t>& dst,
                                              const std::vector<double>& w, index_t rows,
                                              const FeatureMatrix<double>& x) {
  FeatureMatrix<double> y(static_cast<std::size_t>(rows), x.cols());
  for (std::size_t m = 0; m < src.size(); ++m) {
    for (std::size_t n = 0; n < x.cols(); ++n) {
      y(static_cast<std::size_t>(dst[m]), n) += std::abs(w[m] * x(static_cast<std::size_t>(src[m]), n));
    }
  }
  return y;
}

inline std::vector<index_t> sorted_random_index(std::mt19937_64& rng, std::size_t m, index_t range) {
  std::uniform_int_distribution<index_t> d(0, range - 1);
  std::vector<index_t> v(m);
  for (auto& e : v) e = d(rng);
  std::sort(v.begin(), v.end());
  return v;
}

template <typename T>
FeatureMatrix<T> integer_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, int lo = -8, int hi = 8) {
  std::uniform_int_distribution<int> d(lo, hi);
  FeatureMatrix<T> x(rows, cols);
  for (auto& v : x.data()) v = static_cast<T>(d(rng));
  return x;
}

template <typename T>
FeatureMatrix<T> real_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = 0.5,
                             double hi = 1.5) {
  std::uniform_real_distribution<double> d(lo, hi);
  FeatureMatrix<T> x(rows, cols);
  for (auto& v : x.data()) v = static_cast<T>(d(rng));
  return x;
}

struct StressIndex {
  std::string name;
  std::vector<index_t> values;
  index_t out_rows;
};

/// Index shapes that stress tile boundaries and segment layout.
inline std::vector<StressIndex> stress_indices() {
  std::vector<StressIndex> out;
  auto add = [&](std::string name, std::vector<index_t> v, index_t rows = -1) {
    const index_t r = rows > 0 ? rows : v.back() + 1;
    out.push_back({std::move(name), std::move(v), r});
  };
  add("single-segment", std::vector<index_t>(150, 0));
  add("single-segment-leading-empties", std::vector<index_t>(97, 5), 9);
  {
    std::vector<index_t> v(131);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<index_t>(i);
    add("all-singletons", v);
  }
  {
    std::vector<index_t> v;
    for (index_t k = 0; v.size() < 140; ++k) v.insert(v.end(), k % 2 ? 2 : 1, k);
    add("alternating-runs-1-2", v);
  }
  {
    std::vector<index_t> v;
    for (index_t k = 0; v.size() < 150; ++k) v.insert(v.end(), k % 2 ? 9 : 1, k);
    add("alternating-runs-1-9", v);
  }
  {
    // run lengths straddle every power-of-two tile height
    std::vector<index_t> v;
    const int lens[] = {7, 9, 15, 17, 31, 33, 63, 65};
    for (index_t k = 0; k < 8; ++k) v.insert(v.end(), lens[k], k);
    add("runs-straddling-tiles", v);
  }
  {
    const auto idx = synth_index(60, 3.0, LengthDistribution::power_law(1.6), 11);
    add("power-law-a1.6", std::vector<index_t>(idx.values().begin(), idx.values().end()), idx.out_rows());
  }
  {
    const auto idx = synth_index(40, 4.0, LengthDistribution::power_law(2.5), 12);
    add("power-law-a2.5", std::vector<index_t>(idx.values().begin(), idx.values().end()), idx.out_rows());
  }
  {
    std::vector<index_t> v;
    for (index_t k = 0; v.size() < 150; k += 6) v.insert(v.end(), 3, k);
    add("empty-segment-gaps", v, v.back() + 4);
  }
  {
    std::vector<index_t> v;
    for (index_t k = 0; v.size() < 150; k += 1 + k % 5) v.insert(v.end(), 1 + static_cast<std::size_t>(k % 4), k);
    add("mixed-gaps-and-runs", v);
  }
  {
    std::mt19937_64 rng(13);
    add("uniform-random", sorted_random_index(rng, 160, 48), 48);
  }
  {
    const auto& cora = reference_graph_shape("cora");
    const auto g = synth_graph(cora.nodes, cora.edges, 1);
    add("cora-shaped", g.dst, g.num_nodes);
  }
  return out;
}

}  // namespace segred::testing
