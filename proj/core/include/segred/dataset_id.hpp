#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "segred/segmented_index.hpp"
#include "segred/synth.hpp"

namespace segred {

/// Structured form of a dataset_id string. Grammar:
///
///   dataset_id := base ('+aug(' 'scale=' R ',noise=' R ',seed=' U ')')?
///   base       := 'synth(dist=' DIST ',segments=' U ',avg=' R ',seed=' U ')'
///              |  'graph(' PATH ')'
///
/// Every dataset_id deterministically reproduces its index.
struct DatasetId {
  struct Synthetic {
    LengthDistribution dist;
    std::int64_t segments = 1;
    double avg = 1.0;
    std::uint64_t seed = 0;
    friend bool operator==(const Synthetic&, const Synthetic&) = default;
  };
  struct Augment {
    AugmentParams params;
    std::uint64_t seed = 0;
    friend bool operator==(const Augment&, const Augment&) = default;
  };

  std::optional<Synthetic> synthetic;
  std::string graph_path;  ///< set when the base is a graph file
  std::optional<Augment> augment;

  friend bool operator==(const DatasetId&, const DatasetId&) = default;
};

std::string format_dataset_id(const DatasetId& id);
DatasetId parse_dataset_id(const std::string& text);

/// Loads the destination index of a graph file; supplied by callers that
/// can read graphs (the command-line tool).
using GraphIndexLoader = std::function<SegmentedIndex(const std::string& path)>;

/// Rebuilds the index named by a dataset_id.
SegmentedIndex materialize(const DatasetId& id, const GraphIndexLoader& graphs = {});
SegmentedIndex materialize(const std::string& dataset_id, const GraphIndexLoader& graphs = {});

/// Shortest decimal text that round-trips to the same double.
std::string format_real(double v);

}  // namespace segred
