#include "segred/codegen.hpp"

#include "segred/dataset_id.hpp"

namespace segred {
namespace {

std::string leaf_call(const KernelConfig& cfg) {
  std::string out = cfg.schedule == Schedule::SR ? "segreduce_sr<" : "segreduce_pr<";
  out += std::to_string(cfg.n_t) + ", " + std::to_string(cfg.t_n) + ", " + std::to_string(cfg.m_t) +
         ", " + std::to_string(cfg.t_m);
  if (cfg.schedule == Schedule::PR) out += ", " + std::to_string(cfg.g_t);
  return out + ">(idx, X, Y);";
}

void emit_node(const TreeModel& tree, int id, int indent, std::string& out) {
  const TreeNode& node = tree.nodes()[static_cast<std::size_t>(id)];
  const std::string pad(static_cast<std::size_t>(indent) * 4, ' ');
  if (node.is_leaf) {
    out += pad + leaf_call(node.config) + "\n";
    return;
  }
  out += pad + "if (" + std::string(to_string(node.feature)) + " <= " + format_real(node.threshold) + ") {\n";
  emit_node(tree, node.left, indent + 1, out);
  out += pad + "} else {\n";
  emit_node(tree, node.right, indent + 1, out);
  out += pad + "}\n";
}

void emit_function(const TreeModel& tree, const char* name, std::string& out) {
  if (tree.schedule() == Schedule::SR) {
    out += "// <Nt, TN, Mt, TM>\n// Gt=1 for SR\n";
  } else {
    out += "// <Nt, TN, Mt, TM, Gt>\n";
  }
  out += "template <typename Idx, typename Mat>\n";
  out += std::string("inline void ") + name +
         "(const Idx& idx, const Mat& X, Mat& Y, [[maybe_unused]] double avg,\n"
         "    [[maybe_unused]] double idx_size, [[maybe_unused]] double F) {\n";
  emit_node(tree, 0, 1, out);
  out += "}\n";
}

}  // namespace

std::string codegen(const TreeModel& sr_tree, const TreeModel& pr_tree, const CodegenOptions& opts) {
  std::string out = "// Generated by segred codegen " + std::string(kVersion);
  if (opts.seed) out += " (seed=" + std::to_string(*opts.seed) + ")";
  out += ". Do not edit.\n";
  out += "// SR rules: " + std::to_string(sr_tree.leaf_count()) + " leaves, depth " +
         std::to_string(sr_tree.depth()) + "; PR rules: " + std::to_string(pr_tree.leaf_count()) +
         " leaves, depth " + std::to_string(pr_tree.depth()) + ".\n";
  out += "// Requires segreduce_sr<Nt, TN, Mt, TM> and segreduce_pr<Nt, TN, Mt, TM, Gt>.\n";
  out += "#pragma once\n\n";
  emit_function(sr_tree, "dispatch_sr", out);
  out += "\n";
  emit_function(pr_tree, "dispatch_pr", out);
  out += "\n";
  out += "template <typename Idx, typename Mat>\n"
         "inline void dispatch(const Idx& idx, const Mat& X, Mat& Y, double avg, double idx_size,\n"
         "    double F) {\n"
         "    if (F > 4) {\n"
         "        dispatch_sr(idx, X, Y, avg, idx_size, F);\n"
         "    } else {\n"
         "        dispatch_pr(idx, X, Y, avg, idx_size, F);\n"
         "    }\n"
         "}\n";
  return out;
}

}  // namespace segred
