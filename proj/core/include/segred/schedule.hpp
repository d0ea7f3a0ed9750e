#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "segred/types.hpp"

namespace segred {

enum class Schedule : std::uint8_t {
  SR,  ///< sequential reduction: one lane walks the tile rows
  PR,  ///< parallel reduction: G_t lockstep lanes with segmented shuffle-down
};

std::string_view to_string(Schedule s) noexcept;
Schedule parse_schedule(std::string_view text);

/// Tiling and reduction parameters of one kernel instantiation.
///
/// A block covers M_b x N_b = (T_M * M_t) x (T_N * N_t) elements of X and is
/// served by T_M x T_N thread groups, each owning an M_t x N_t tile.
struct KernelConfig {
  Schedule schedule = Schedule::SR;
  int t_n = 32;
  int t_m = 1;
  int m_t = 8;
  int n_t = 1;
  int g_t = 1;

  int block_rows() const noexcept { return t_m * m_t; }
  int block_cols() const noexcept { return t_n * n_t; }

  /// Ordering key: (T_N, T_M, M_t, N_t, G_t).
  auto lex_key() const noexcept { return std::tuple(t_n, t_m, m_t, n_t, g_t); }

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
  friend auto operator<=>(const KernelConfig& a, const KernelConfig& b) noexcept {
    if (auto c = a.schedule <=> b.schedule; c != 0) return c;
    return a.lex_key() <=> b.lex_key();
  }
};

/// "SR,T_N=32,T_M=8,M_t=8,N_t=1" (G_t omitted for SR) or
/// "PR,T_N=16,T_M=4,M_t=32,N_t=1,G_t=8".
std::string format_config(const KernelConfig& cfg);

/// Inverse of format_config. Keys may appear in any order; G_t defaults to 1.
/// Throws std::invalid_argument on malformed text.
KernelConfig parse_config(std::string_view text);

/// Pruned candidate value sets. The defaults are compiled in; a key=value
/// file can replace any of them.
struct CandidateSets {
  std::vector<int> t_n{16, 32, 64};
  std::vector<int> t_m{1, 2, 4, 8};
  std::vector<int> m_t{8, 16, 32, 64};
  std::vector<int> n_t{1, 2, 4};
  std::vector<int> g_t{8, 16, 32};

  static const CandidateSets& defaults();

  /// Lines of the form `T_N=16,32,64`; '#' starts a comment. Keys not
  /// mentioned keep their default sets.
  static CandidateSets parse(std::string_view text, const std::string& source = "<string>");
  static CandidateSets load(const std::string& path);

  friend bool operator==(const CandidateSets&, const CandidateSets&) = default;
};

/// Constraints a kernel needs to run at all: positive extents, SR => G_t = 1,
/// PR => 2 <= G_t <= 32, G_t <= M_t, M_t divisible by G_t.
std::vector<std::string> structural_violations(const KernelConfig& cfg);

/// Every violated invariant, structural and candidate-membership. Empty
/// means valid. Never throws.
std::vector<std::string> validate_config(const KernelConfig& cfg,
                                         const CandidateSets& candidates = CandidateSets::defaults());

/// Full candidate space for a schedule in lexicographic order.
std::vector<KernelConfig> enumerate_configs(Schedule schedule,
                                            const CandidateSets& candidates = CandidateSets::defaults());

/// SR when the feature width exceeds 4, PR otherwise.
Schedule default_schedule(std::int64_t feature_size);

/// Static per-F-bucket configuration in the style of a hand-written GPU
/// heuristic. Used when no trained rules are supplied and as the baseline
/// the trained rules are measured against.
KernelConfig hand_rule_config(std::int64_t feature_size);

struct GridShape {
  std::int64_t blocks_m = 1;
  std::int64_t blocks_n = 1;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

GridShape grid_shape(const KernelConfig& cfg, std::int64_t m, std::int64_t n);

/// Half-open element ranges owned by one thread group. Ranges are not
/// clamped to the matrix; kernels mask the overhang.
struct GroupTile {
  std::int64_t row_begin = 0;
  std::int64_t row_end = 0;
  std::int64_t col_begin = 0;
  std::int64_t col_end = 0;
};

/// Thread groups are numbered block-major: ((bm * blocks_n + bn) * T_M + tm) * T_N + tn.
std::size_t group_count(const KernelConfig& cfg, const GridShape& grid) noexcept;
GroupTile group_tile(const KernelConfig& cfg, const GridShape& grid, std::size_t group) noexcept;

}  // namespace segred
