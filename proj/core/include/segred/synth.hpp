#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segred/segmented_index.hpp"

namespace segred {

/// Derives an independent stream seed (splitmix64 finalizer over seed ^ stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Stable 64-bit FNV-1a hash of a string, for seeding per-dataset streams.
std::uint64_t stable_hash(const std::string& text) noexcept;

/// Distribution of segment lengths for synthetic indices.
struct LengthDistribution {
  enum class Kind { Uniform, PowerLaw };
  Kind kind = Kind::Uniform;
  double alpha = 2.0;  ///< Pareto shape, PowerLaw only; must be > 1

  static LengthDistribution uniform() { return {}; }
  static LengthDistribution power_law(double alpha) { return {Kind::PowerLaw, alpha}; }

  friend bool operator==(const LengthDistribution&, const LengthDistribution&) = default;
};

std::string to_string(const LengthDistribution& dist);
/// "uniform" or "powerlaw:<alpha>".
LengthDistribution parse_distribution(const std::string& text);

/// Sorted index with num_segments output rows and round(num_segments *
/// target_avg) entries. Segment lengths are proportional to weights drawn
/// from dist (largest-remainder rounding keeps the total exact); empty
/// segments may occur. Deterministic in (params, seed).
SegmentedIndex synth_index(std::int64_t num_segments, double target_avg, LengthDistribution dist,
                           std::uint64_t seed);

/// Length of every segment 0..idx_max-1.
std::vector<std::int64_t> segment_lengths(const SegmentedIndex& idx);

/// Inverse of segment_lengths.
SegmentedIndex index_from_lengths(const std::vector<std::int64_t>& lengths);

/// One augmentation variant: segment count scaled by `scale`, every length
/// jittered by a factor in [1 - noise, 1 + noise].
struct AugmentParams {
  double scale = 1.0;
  double noise = 0.0;

  friend bool operator==(const AugmentParams&, const AugmentParams&) = default;
};

SegmentedIndex augment_index(const SegmentedIndex& base, AugmentParams params, std::uint64_t seed);

/// Cross product of scale_factors x noise_levels, in that nesting order.
/// Variant k uses seed mix_seed(seed, k).
std::vector<SegmentedIndex> augment_dataset(const SegmentedIndex& base,
                                            const std::vector<double>& scale_factors,
                                            const std::vector<double>& noise_levels,
                                            std::uint64_t seed);

/// Default augmentation grid: 6 scales x 10 noise levels = 60 variants.
std::vector<double> default_scale_grid();
std::vector<double> default_noise_grid();

/// Published node/edge counts of common GNN benchmark graphs.
struct GraphShape {
  const char* name;
  std::int64_t nodes;
  std::int64_t edges;
};
const std::vector<GraphShape>& reference_graph_shapes();
const GraphShape& reference_graph_shape(const std::string& name);

/// Edge list with the given shape: destination in-degrees follow a
/// power law, sources are uniform. Sorted by (dst, src).
struct SyntheticGraph {
  std::vector<index_t> src;
  std::vector<index_t> dst;
  std::int64_t num_nodes = 0;
};
SyntheticGraph synth_graph(std::int64_t nodes, std::int64_t edges, std::uint64_t seed,
                           double alpha = 2.5);

}  // namespace segred
