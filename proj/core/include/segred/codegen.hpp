#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "segred/tree.hpp"

namespace segred {

struct CodegenOptions {
  std::optional<std::uint64_t> seed;
};

/// C++ header text with dispatch_sr / dispatch_pr (nested if-else over
/// avg, idx_size and F, `<=` going left) and a dispatch() router that picks
/// SR when F > 4. Leaves call segreduce_sr<N_t, T_N, M_t, T_M> or
/// segreduce_pr<N_t, T_N, M_t, T_M, G_t>, which the including translation
/// unit must declare. Output is deterministic.
std::string codegen(const TreeModel& sr_tree, const TreeModel& pr_tree, const CodegenOptions& opts = {});

}  // namespace segred
