#include "segred/reduce_op.hpp"

#include <stdexcept>
#include <string>

namespace segred {

std::string_view to_string(ReduceOp op) noexcept {
  switch (op.kind()) {
    case ReduceKind::Sum: return "sum";
    case ReduceKind::Mean: return "mean";
    case ReduceKind::Max: return "max";
  }
  return "sum";
}

ReduceOp parse_reduce_op(std::string_view text) {
  if (text == "sum") return ReduceOp::sum();
  if (text == "mean") return ReduceOp::mean();
  if (text == "max") return ReduceOp::max();
  throw std::invalid_argument("unknown reduce op '" + std::string(text) + "'");
}

}  // namespace segred
