#include "segred/segment_reduce.hpp"

#include <stdexcept>
#include <string>

namespace segred {
namespace {

template <typename T>
KernelConfig choose_config(const SegmentedIndex& idx, std::size_t cols,
                           const std::optional<KernelConfig>& cfg, const ExecOptions& opts) {
  if (cfg) return *cfg;
  const auto f = static_cast<std::int64_t>(std::max<std::size_t>(cols, 1));
  if (opts.selector && !idx.empty()) return opts.selector(idx, f);
  return hand_rule_config(f);
}

/// Shared driver: identity-init, kernel, Mean division, empty-row policy.
template <typename T>
FeatureMatrix<T> reduce_impl(const SegmentedIndex& idx, const FeatureMatrix<T>& x,
                             std::span<const index_t> src, std::span<const T> weights, ReduceOp op,
                             const std::optional<KernelConfig>& cfg, const ExecOptions& opts) {
  const KernelConfig chosen = choose_config<T>(idx, x.cols(), cfg, opts);
  FeatureMatrix<T> y(static_cast<std::size_t>(idx.out_rows()), x.cols(), op.identity<T>());
  run_kernel<T>(idx, x, src, weights, y, op, chosen, opts);

  const bool fix_empty_max = op.is_max() && opts.empty_as_zero;
  if (op.kind() == ReduceKind::Mean || fix_empty_max) {
    const auto counts = idx.segment_counts();
    for (std::size_t i = 0; i < y.rows(); ++i) {
      const index_t c = counts[i];
      auto row = y.row(i);
      if (op.kind() == ReduceKind::Mean) {
        if (c == 0) continue;
        const T denom = static_cast<T>(c);
        for (auto& v : row) v /= denom;
      } else if (c == 0) {
        for (auto& v : row) v = T(0);
      }
    }
  }
  return y;
}

}  // namespace

template <typename T>
FeatureMatrix<T> segment_reduce_oracle(const SegmentedIndex& idx, const FeatureMatrix<T>& x,
                                       ReduceOp op) {
  if (x.rows() != idx.size()) {
    throw std::invalid_argument("oracle: x has " + std::to_string(x.rows()) + " rows, idx has " +
                                std::to_string(idx.size()) + " entries");
  }
  FeatureMatrix<T> y(static_cast<std::size_t>(idx.out_rows()), x.cols(), op.identity<T>());
  for (std::size_t m = 0; m < idx.size(); ++m) {
    auto out = y.row(static_cast<std::size_t>(idx[m]));
    auto in = x.row(m);
    for (std::size_t n = 0; n < x.cols(); ++n) out[n] = op.combine(out[n], in[n]);
  }
  if (op.kind() == ReduceKind::Mean) {
    const auto counts = idx.segment_counts();
    for (std::size_t i = 0; i < y.rows(); ++i) {
      if (counts[i] == 0) continue;
      for (auto& v : y.row(i)) v /= static_cast<T>(counts[i]);
    }
  }
  return y;
}

template <typename T>
FeatureMatrix<T> segment_reduce(const SegmentedIndex& idx, const FeatureMatrix<T>& x, ReduceOp op,
                                std::optional<KernelConfig> cfg, const ExecOptions& opts) {
  return reduce_impl<T>(idx, x, {}, {}, op, cfg, opts);
}

template <typename T>
FeatureMatrix<T> index_segment_reduce(std::span<const index_t> src, const SegmentedIndex& dst,
                                      const FeatureMatrix<T>& x, ReduceOp op,
                                      std::optional<KernelConfig> cfg, const ExecOptions& opts) {
  if (src.size() != dst.size()) {
    throw std::invalid_argument("src length " + std::to_string(src.size()) + " != dst length " +
                                std::to_string(dst.size()));
  }
  if (src.empty()) return reduce_impl<T>(dst, FeatureMatrix<T>(0, x.cols()), {}, {}, op, cfg, opts);
  return reduce_impl<T>(dst, x, src, {}, op, cfg, opts);
}

template <typename T>
FeatureMatrix<T> index_weight_segment_reduce(std::span<const index_t> src,
                                             const SegmentedIndex& dst, std::span<const T> w,
                                             const FeatureMatrix<T>& x,
                                             std::optional<KernelConfig> cfg,
                                             const ExecOptions& opts, ReduceOp op) {
  if (op.kind() != ReduceKind::Sum) {
    throw std::invalid_argument("index_weight_segment_reduce supports only sum, got " +
                                std::string(to_string(op)));
  }
  if (w.size() != dst.size()) {
    throw std::invalid_argument("weight length " + std::to_string(w.size()) + " != dst length " +
                                std::to_string(dst.size()));
  }
  if (src.size() != dst.size()) {
    throw std::invalid_argument("src length " + std::to_string(src.size()) + " != dst length " +
                                std::to_string(dst.size()));
  }
  if (src.empty()) return reduce_impl<T>(dst, FeatureMatrix<T>(0, x.cols()), {}, {}, op, cfg, opts);
  return reduce_impl<T>(dst, x, src, w, op, cfg, opts);
}

template <typename T>
FeatureMatrix<T> gather(std::span<const index_t> src, const FeatureMatrix<T>& x) {
  FeatureMatrix<T> out(src.size(), x.cols());
  const auto rows = static_cast<index_t>(x.rows());
  for (std::size_t m = 0; m < src.size(); ++m) {
    if (src[m] < 0 || src[m] >= rows) {
      throw std::out_of_range("gather: src[" + std::to_string(m) + "] = " +
                              std::to_string(src[m]) + " outside [0, " + std::to_string(rows) + ")");
    }
    const auto in = x.row(static_cast<std::size_t>(src[m]));
    std::copy(in.begin(), in.end(), out.row(m).begin());
  }
  return out;
}

#define SEGRED_INSTANTIATE_REDUCE(T)                                                             \
  template FeatureMatrix<T> segment_reduce_oracle<T>(const SegmentedIndex&,                    \
                                                     const FeatureMatrix<T>&, ReduceOp);       \
  template FeatureMatrix<T> segment_reduce<T>(const SegmentedIndex&, const FeatureMatrix<T>&,  \
                                              ReduceOp, std::optional<KernelConfig>,           \
                                              const ExecOptions&);                             \
  template FeatureMatrix<T> index_segment_reduce<T>(                                           \
      std::span<const index_t>, const SegmentedIndex&, const FeatureMatrix<T>&, ReduceOp,      \
      std::optional<KernelConfig>, const ExecOptions&);                                        \
  template FeatureMatrix<T> index_weight_segment_reduce<T>(                                    \
      std::span<const index_t>, const SegmentedIndex&, std::span<const T>,                     \
      const FeatureMatrix<T>&, std::optional<KernelConfig>, const ExecOptions&, ReduceOp);     \
  template FeatureMatrix<T> gather<T>(std::span<const index_t>, const FeatureMatrix<T>&);

SEGRED_INSTANTIATE_REDUCE(float)
SEGRED_INSTANTIATE_REDUCE(double)

}  // namespace segred
