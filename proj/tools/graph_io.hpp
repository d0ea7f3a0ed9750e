#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "segred/segmented_index.hpp"

namespace segred::cli {

enum class GraphFormat { Tsv, MatrixMarket };

/// "tsv" or "mtx"/"matrixmarket".
GraphFormat parse_graph_format(const std::string& text);
/// From the file extension: .mtx is MatrixMarket, anything else TSV.
GraphFormat guess_graph_format(const std::string& path);

/// COO edges. Once canonicalized, dst is non-decreasing and ties keep src
/// ascending, so dst doubles as a segment index.
struct EdgeList {
  std::vector<index_t> src;
  std::vector<index_t> dst;
  std::vector<double> weight;  ///< empty when unweighted
  std::int64_t num_nodes = 0;

  std::size_t size() const noexcept { return dst.size(); }
  bool weighted() const noexcept { return !weight.empty(); }
  /// Stable sort by (dst, src); duplicates are kept.
  void canonicalize();
  /// dst as a segment index with num_nodes output rows.
  SegmentedIndex dst_index() const;

  friend bool operator==(const EdgeList&, const EdgeList&) = default;
};

/// TSV: `src<TAB>dst[<TAB>w]` per line, '#' comments, an optional
/// `# nodes=N` line. Without it num_nodes = max id + 1.
EdgeList parse_tsv(const std::string& text, const std::string& source = "<string>");
/// MatrixMarket coordinate (pattern|real|integer, general|symmetric).
/// Entry (i, j) is the edge j -> i; indices become 0-based.
EdgeList parse_matrix_market(const std::string& text, const std::string& source = "<string>");

EdgeList load_graph(const std::string& path, std::optional<GraphFormat> format = std::nullopt);

std::string format_tsv(const EdgeList& edges);
void save_graph_tsv(const EdgeList& edges, const std::string& path);

}  // namespace segred::cli
