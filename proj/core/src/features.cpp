#include "segred/features.hpp"

namespace segred {

template FeatureVector extract_features<SegmentedIndex>(const SegmentedIndex&, std::int64_t);

}  // namespace segred
