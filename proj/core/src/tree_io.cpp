#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "segred/dataset_id.hpp"
#include "segred/tree.hpp"

namespace segred {
namespace {

constexpr int kIndent = 2;

void write_node(const TreeModel& tree, int id, int depth, std::string& out) {
  const TreeNode& node = tree.nodes()[static_cast<std::size_t>(id)];
  out.append(static_cast<std::size_t>(depth * kIndent), ' ');
  if (node.is_leaf) {
    out += "leaf " + format_config(node.config) + "\n";
    return;
  }
  out += "split " + std::string(to_string(node.feature)) + " <= " + format_real(node.threshold) + "\n";
  write_node(tree, node.left, depth + 1, out);
  write_node(tree, node.right, depth + 1, out);
}

struct Line {
  std::size_t number;
  int depth;
  std::string body;
};

class TreeParser {
 public:
  TreeParser(std::vector<Line> lines, std::string source, const CandidateSets& candidates)
      : lines_(std::move(lines)), source_(std::move(source)), candidates_(candidates) {}

  std::vector<TreeNode> parse(Schedule tag) {
    tag_ = tag;
    if (lines_.empty()) throw ParseError(source_, last_line_, "tree has no nodes");
    parse_node(0);
    if (pos_ != lines_.size()) {
      throw ParseError(source_, lines_[pos_].number, "unexpected node after the tree is complete");
    }
    return std::move(nodes_);
  }

  void set_last_line(std::size_t n) { last_line_ = n; }

 private:
  int parse_node(int depth) {
    if (pos_ >= lines_.size()) throw ParseError(source_, last_line_, "truncated tree: missing child node");
    const Line& line = lines_[pos_++];
    if (line.depth != depth) {
      throw ParseError(source_, line.number, "expected indentation depth " + std::to_string(depth) +
                                                 ", found " + std::to_string(line.depth));
    }
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    std::istringstream words(line.body);
    std::string kind;
    words >> kind;
    if (kind == "leaf") {
      std::string text;
      words >> text;
      std::string extra;
      if (text.empty() || (words >> extra)) throw ParseError(source_, line.number, "leaf needs exactly one config");
      KernelConfig cfg;
      try {
        cfg = parse_config(text);
      } catch (const std::invalid_argument& e) {
        throw ParseError(source_, line.number, "leaf config invalid: " + std::string(e.what()));
      }
      if (cfg.schedule != tag_) {
        throw ParseError(source_, line.number, "leaf config " + text + " does not match tree schedule " +
                                                   std::string(to_string(tag_)));
      }
      if (auto v = validate_config(cfg, candidates_); !v.empty()) {
        throw ParseError(source_, line.number, "leaf config " + text + " invalid: " + v.front());
      }
      nodes_[static_cast<std::size_t>(id)].config = cfg;
      return id;
    }
    if (kind != "split") throw ParseError(source_, line.number, "expected 'split' or 'leaf', got '" + kind + "'");
    std::string feature, op, threshold, extra;
    words >> feature >> op >> threshold;
    if (op != "<=" || threshold.empty() || (words >> extra)) {
      throw ParseError(source_, line.number, "expected 'split <feature> <= <threshold>'");
    }
    TreeNode node;
    node.is_leaf = false;
    try {
      node.feature = parse_tree_feature(feature);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source_, line.number, e.what());
    }
    auto [p, ec] = std::from_chars(threshold.data(), threshold.data() + threshold.size(), node.threshold);
    if (ec != std::errc{} || p != threshold.data() + threshold.size()) {
      throw ParseError(source_, line.number, "bad threshold '" + threshold + "'");
    }
    node.left = parse_node(depth + 1);
    node.right = parse_node(depth + 1);
    nodes_[static_cast<std::size_t>(id)] = node;
    return id;
  }

  std::vector<Line> lines_;
  std::string source_;
  const CandidateSets& candidates_;
  Schedule tag_ = Schedule::SR;
  std::vector<TreeNode> nodes_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 1;
};

}  // namespace

std::string format_tree(const TreeModel& tree, std::optional<std::uint64_t> seed) {
  std::string out = "# segred-tree version=" + std::string(kVersion);
  if (seed) out += " seed=" + std::to_string(*seed);
  out += "\n# depth=" + std::to_string(tree.depth()) + " leaves=" + std::to_string(tree.leaf_count()) + "\n";
  out += "tree schedule=" + std::string(to_string(tree.schedule())) +
         " max_depth=" + std::to_string(tree.max_depth()) + "\n";
  write_node(tree, 0, 0, out);
  return out;
}

TreeModel parse_tree(const std::string& text, const std::string& source, const CandidateSets& candidates) {
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  std::optional<Schedule> tag;
  int max_depth = 5;
  std::vector<Line> lines;
  while (std::getline(in, raw)) {
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto first = raw.find_first_not_of(' ');
    if (first == std::string::npos || raw[first] == '#') continue;
    if (raw.find('\t') != std::string::npos) throw ParseError(source, number, "tabs are not allowed; indent with spaces");
    if (!tag) {
      std::istringstream words(raw);
      std::string head, sched, depth;
      words >> head >> sched >> depth;
      if (head != "tree" || sched.rfind("schedule=", 0) != 0 || depth.rfind("max_depth=", 0) != 0) {
        throw ParseError(source, number, "expected 'tree schedule=<SR|PR> max_depth=<n>'");
      }
      try {
        tag = parse_schedule(sched.substr(9));
        max_depth = std::stoi(depth.substr(10));
      } catch (const std::exception& e) {
        throw ParseError(source, number, std::string("bad tree header: ") + e.what());
      }
      continue;
    }
    if (first % kIndent != 0) throw ParseError(source, number, "indentation must be a multiple of 2 spaces");
    lines.push_back({number, static_cast<int>(first) / kIndent, raw.substr(first)});
  }
  if (!tag) throw ParseError(source, std::max<std::size_t>(number, 1), "missing tree header");
  TreeParser parser(std::move(lines), source, candidates);
  parser.set_last_line(std::max<std::size_t>(number, 1));
  auto nodes = parser.parse(*tag);
  try {
    return TreeModel(*tag, max_depth, std::move(nodes));
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, std::max<std::size_t>(number, 1), e.what());
  }
}

void save_tree(const TreeModel& tree, const std::string& path, std::optional<std::uint64_t> seed) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write tree file '" + path + "'");
  out << format_tree(tree, seed);
  if (!out) throw std::runtime_error("write failed for tree file '" + path + "'");
}

TreeModel load_tree(const std::string& path, const CandidateSets& candidates) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tree(buf.str(), path, candidates);
}

}  // namespace segred
