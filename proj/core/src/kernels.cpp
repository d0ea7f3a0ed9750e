#include "segred/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <stdexcept>
#include <string>

#include "segred/lane_group.hpp"
#include "segred/worker_pool.hpp"

namespace segred {
namespace {

enum class LoadMode { Direct, Gather, WeightedGather };

/// Reads reduction-input element (m, n) without materializing the gathered rows.
template <typename T, LoadMode Mode>
struct RowLoader {
  const T* x;
  std::size_t cols;
  const index_t* src;
  const T* weights;

  T operator()(index_t m, std::int64_t n) const noexcept {
    if constexpr (Mode == LoadMode::Direct) {
      return x[static_cast<std::size_t>(m) * cols + static_cast<std::size_t>(n)];
    } else if constexpr (Mode == LoadMode::Gather) {
      return x[static_cast<std::size_t>(src[m]) * cols + static_cast<std::size_t>(n)];
    } else {
      return weights[m] * x[static_cast<std::size_t>(src[m]) * cols + static_cast<std::size_t>(n)];
    }
  }
};

/// Compile-time fold so the inner loops carry no op branch.
template <typename T, bool IsMax>
struct Fold {
  static constexpr T identity() noexcept {
    if constexpr (IsMax) {
      return -std::numeric_limits<T>::infinity();
    } else {
      return T(0);
    }
  }
  static constexpr T combine(T a, T b) noexcept {
    if constexpr (IsMax) {
      return std::max(a, b);
    } else {
      return a + b;
    }
  }
  static constexpr ReduceOp op() noexcept { return IsMax ? ReduceOp::max() : ReduceOp::sum(); }
};

template <typename T>
struct PendingCommit {
  index_t row;
  std::int64_t col;
  T value;
};

template <typename T>
void atomic_combine(T& cell, T value, ReduceOp op) noexcept {
  std::atomic_ref<T> ref(cell);
  T current = ref.load(std::memory_order_relaxed);
  if (op.is_max()) {
    while (current < value &&
           !ref.compare_exchange_weak(current, value, std::memory_order_relaxed)) {
    }
  } else {
    while (!ref.compare_exchange_weak(current, current + value, std::memory_order_relaxed)) {
    }
  }
}

/// Tile of one thread group clipped to the matrix.
struct ClampedTile {
  std::int64_t row_begin, row_end, col_begin, col_end;
  std::int64_t rows() const noexcept { return std::max<std::int64_t>(0, row_end - row_begin); }
  std::int64_t cols() const noexcept { return std::max<std::int64_t>(0, col_end - col_begin); }
};

/// Runs group_body(tile, emit) for every thread group and publishes the
/// emitted (row, col, value) commits into y according to opts.commit.
template <typename T, typename F, typename GroupBody>
void execute_groups(const KernelConfig& cfg, std::int64_t m, std::int64_t n, FeatureMatrix<T>& y,
                    const ExecOptions& opts, GroupBody&& group_body) {
  if (opts.stats) *opts.stats = KernelStats{};
  if (m == 0 || n == 0) return;

  const GridShape grid = grid_shape(cfg, m, n);
  const std::size_t groups = group_count(cfg, grid);
  auto clamp = [&](std::size_t g) {
    const GroupTile t = group_tile(cfg, grid, g);
    return ClampedTile{t.row_begin, std::min(t.row_end, m), t.col_begin, std::min(t.col_end, n)};
  };

  const bool deterministic = opts.commit == CommitMode::Deterministic;
  std::vector<std::size_t> offsets;
  // Reused across calls on this thread; only grows, never re-zeroed.
  static thread_local std::vector<PendingCommit<T>> scratch;
  auto& pending = scratch;  // workers must see the calling thread's buffer
  if (deterministic) {
    offsets.resize(groups + 1, 0);
    for (std::size_t g = 0; g < groups; ++g) {
      const ClampedTile t = clamp(g);
      offsets[g + 1] = offsets[g] + static_cast<std::size_t>(t.rows() * t.cols());
    }
    if (pending.size() < offsets.back()) pending.resize(offsets.back());
  }
  std::vector<std::uint32_t> counts(groups, 0);

  T* out = y.data().data();
  const auto out_cols = static_cast<std::size_t>(n);

  parallel_for(groups, opts.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      const ClampedTile tile = clamp(g);
      if (tile.rows() == 0 || tile.cols() == 0) continue;
      std::uint32_t count = 0;
      if (deterministic) {
        PendingCommit<T>* slot = pending.data() + offsets[g];
        group_body(tile, [&](index_t row, std::int64_t col, T value) {
          slot[count++] = {row, col, value};
        });
      } else {
        group_body(tile, [&](index_t row, std::int64_t col, T value) {
          atomic_combine(out[static_cast<std::size_t>(row) * out_cols + static_cast<std::size_t>(col)],
                         value, F::op());
          ++count;
        });
      }
      counts[g] = count;
    }
  });

  if (deterministic) {
    for (std::size_t g = 0; g < groups; ++g) {
      const PendingCommit<T>* slot = pending.data() + offsets[g];
      for (std::uint32_t i = 0; i < counts[g]; ++i) {
        T& cell = out[static_cast<std::size_t>(slot[i].row) * out_cols + static_cast<std::size_t>(slot[i].col)];
        cell = F::combine(cell, slot[i].value);
      }
    }
  }

  if (opts.stats) {
    opts.stats->group_commits = counts;
    for (auto c : counts) opts.stats->total_commits += c;
  }
}

/// One lane walks M_t rows per column, keeping the running fold in a
/// register and committing only when the key changes or the tile ends.
template <typename T, typename F, typename Loader>
void sr_kernel(const SegmentedIndex& idx, const Loader& load, FeatureMatrix<T>& y,
               const KernelConfig& cfg, const ExecOptions& opts) {
  const index_t* keys = idx.data();
  constexpr T identity = F::identity();
  execute_groups<T, F>(cfg, static_cast<std::int64_t>(idx.size()), static_cast<std::int64_t>(y.cols()),
                       y, opts, [&](const ClampedTile& tile, auto&& emit) {
    for (std::int64_t col = tile.col_begin; col < tile.col_end; ++col) {
      index_t key = keys[tile.row_begin];
      T acc = identity;
      for (std::int64_t mid = tile.row_begin; mid < tile.row_end; ++mid) {
        const index_t k = keys[mid];
        if (k != key) {
          emit(key, col, acc);
          key = k;
          acc = identity;
        }
        acc = F::combine(acc, load(mid, col));
      }
      emit(key, col, acc);
    }
  });
}

/// G_t lanes cover G_t consecutive rows per sub-iteration; mid =
/// tile_row_base + i * G_t + lane, nid = tile column. Segment heads commit
/// their run totals after the segmented shuffle-down.
template <typename T, typename F, typename Loader>
void pr_kernel(const SegmentedIndex& idx, const Loader& load, FeatureMatrix<T>& y,
               const KernelConfig& cfg, const ExecOptions& opts) {
  const index_t* keys_in = idx.data();
  constexpr T identity = F::identity();
  const LaneGroup group(cfg.g_t);
  const int lanes = cfg.g_t;
  const int sub_iterations = cfg.m_t / cfg.g_t;
  const auto combine = [](T a, T b) { return F::combine(a, b); };
  constexpr index_t kMaskedKey = -1;

  execute_groups<T, F>(cfg, static_cast<std::int64_t>(idx.size()), static_cast<std::int64_t>(y.cols()),
                       y, opts, [&](const ClampedTile& tile, auto&& emit) {
    LaneRegister<index_t> keys{};
    LaneRegister<T> values{};
    for (int i = 0; i < sub_iterations; ++i) {
      const std::int64_t base = tile.row_begin + static_cast<std::int64_t>(i) * lanes;
      if (base >= tile.row_end) break;
      LaneMask live = 0;
      for (int r = 0; r < lanes; ++r) {
        const std::int64_t mid = base + r;
        if (mid < tile.row_end) {
          keys[r] = keys_in[mid];
          live |= LaneMask{1} << r;
        } else {
          keys[r] = kMaskedKey;
        }
      }
      // Tile keys are sorted and masked lanes only trail, so runs are contiguous.
      const LaneMask adjacent = adjacent_equal(group, keys);
      const LaneMask heads = segment_heads_runs(group, adjacent) & live;
      const SegmentedShufflePlan plan = plan_segmented_shuffle_runs(group, adjacent);

      for (std::int64_t col = tile.col_begin; col < tile.col_end; ++col) {
        for (int r = 0; r < lanes; ++r) {
          values[r] = (live >> r & 1u) ? load(base + r, col) : identity;
        }
        apply_segmented_shuffle(group, plan, values, combine);
        for (LaneMask h = heads; h != 0; h &= h - 1) {
          const int r = std::countr_zero(h);
          emit(keys[r], col, values[r]);
        }
      }
    }
  });
}

template <typename T>
void check_output(const SegmentedIndex& idx, std::size_t cols, const FeatureMatrix<T>& y) {
  if (y.rows() != static_cast<std::size_t>(idx.out_rows()) || y.cols() != cols) {
    throw std::invalid_argument("output matrix must be out_rows x cols (" +
                                std::to_string(idx.out_rows()) + " x " + std::to_string(cols) +
                                "), got " + std::to_string(y.rows()) + " x " +
                                std::to_string(y.cols()));
  }
}

template <typename T, typename Loader>
void dispatch_schedule(const SegmentedIndex& idx, const Loader& load, FeatureMatrix<T>& y,
                       ReduceOp op, const KernelConfig& cfg, const ExecOptions& opts) {
  auto run = [&](auto fold) {
    using F = decltype(fold);
    if (cfg.schedule == Schedule::SR) {
      sr_kernel<T, F>(idx, load, y, cfg, opts);
    } else {
      pr_kernel<T, F>(idx, load, y, cfg, opts);
    }
  };
  if (op.is_max()) {
    run(Fold<T, true>{});
  } else {
    run(Fold<T, false>{});
  }
}

}  // namespace

void require_runnable(const KernelConfig& cfg, Schedule expected) {
  if (cfg.schedule != expected) {
    throw std::invalid_argument("config " + format_config(cfg) + " is not a " +
                                std::string(to_string(expected)) + " config");
  }
  if (auto v = structural_violations(cfg); !v.empty()) {
    throw std::invalid_argument("config " + format_config(cfg) + " invalid: " + v.front());
  }
}

template <typename T>
void run_sr_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, FeatureMatrix<T>& y,
                   ReduceOp op, const KernelConfig& cfg, const ExecOptions& opts) {
  require_runnable(cfg, Schedule::SR);
  run_kernel<T>(idx, x, {}, {}, y, op, cfg, opts);
}

template <typename T>
void run_pr_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, FeatureMatrix<T>& y,
                   ReduceOp op, const KernelConfig& cfg, const ExecOptions& opts) {
  require_runnable(cfg, Schedule::PR);
  run_kernel<T>(idx, x, {}, {}, y, op, cfg, opts);
}

template <typename T>
void run_kernel(const SegmentedIndex& idx, const FeatureMatrix<T>& x, std::span<const index_t> src,
                std::span<const T> weights, FeatureMatrix<T>& y, ReduceOp op,
                const KernelConfig& cfg, const ExecOptions& opts) {
  require_runnable(cfg, cfg.schedule);
  check_output(idx, x.cols(), y);
  const T* xp = x.data().data();
  if (src.empty() && idx.size() != 0) {
    if (!weights.empty()) throw std::invalid_argument("weights require a gather index");
    if (x.rows() != idx.size()) {
      throw std::invalid_argument("x has " + std::to_string(x.rows()) + " rows but idx has " +
                                  std::to_string(idx.size()) + " entries");
    }
    dispatch_schedule(idx, RowLoader<T, LoadMode::Direct>{xp, x.cols(), nullptr, nullptr}, y, op, cfg, opts);
    return;
  }
  if (src.size() != idx.size()) {
    throw std::invalid_argument("src length " + std::to_string(src.size()) +
                                " != dst length " + std::to_string(idx.size()));
  }
  const auto rows = static_cast<index_t>(x.rows());
  for (std::size_t m = 0; m < src.size(); ++m) {
    if (src[m] < 0 || src[m] >= rows) {
      throw std::out_of_range("src[" + std::to_string(m) + "] = " + std::to_string(src[m]) +
                              " outside [0, " + std::to_string(rows) + ")");
    }
  }
  if (weights.empty()) {
    dispatch_schedule(idx, RowLoader<T, LoadMode::Gather>{xp, x.cols(), src.data(), nullptr}, y, op, cfg, opts);
  } else {
    if (weights.size() != idx.size()) {
      throw std::invalid_argument("weight length " + std::to_string(weights.size()) +
                                  " != index length " + std::to_string(idx.size()));
    }
    dispatch_schedule(idx, RowLoader<T, LoadMode::WeightedGather>{xp, x.cols(), src.data(), weights.data()},
                      y, op, cfg, opts);
  }
}

#define SEGRED_INSTANTIATE_KERNELS(T)                                                            \
  template void run_sr_kernel<T>(const SegmentedIndex&, const FeatureMatrix<T>&,               \
                                 FeatureMatrix<T>&, ReduceOp, const KernelConfig&,             \
                                 const ExecOptions&);                                          \
  template void run_pr_kernel<T>(const SegmentedIndex&, const FeatureMatrix<T>&,               \
                                 FeatureMatrix<T>&, ReduceOp, const KernelConfig&,             \
                                 const ExecOptions&);                                          \
  template void run_kernel<T>(const SegmentedIndex&, const FeatureMatrix<T>&,                  \
                              std::span<const index_t>, std::span<const T>, FeatureMatrix<T>&, \
                              ReduceOp, const KernelConfig&, const ExecOptions&);

SEGRED_INSTANTIATE_KERNELS(float)
SEGRED_INSTANTIATE_KERNELS(double)

}  // namespace segred
