#include "aggforge/ops.hpp"

namespace aggforge {

std::string to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "add";
    case BinaryOp::sub: return "sub";
    case BinaryOp::mul: return "mul";
    case BinaryOp::div: return "div";
    case BinaryOp::copy_lhs: return "copylhs";
    case BinaryOp::copy_rhs: return "copyrhs";
  }
  return "?";
}

std::string to_string(ReduceOp op) {
  switch (op) {
    case ReduceOp::sum: return "sum";
    case ReduceOp::max: return "max";
    case ReduceOp::min: return "min";
  }
  return "?";
}

BinaryOp parse_binary_op(const std::string& name) {
  if (name == "add") return BinaryOp::add;
  if (name == "sub") return BinaryOp::sub;
  if (name == "mul") return BinaryOp::mul;
  if (name == "div") return BinaryOp::div;
  if (name == "copylhs") return BinaryOp::copy_lhs;
  if (name == "copyrhs") return BinaryOp::copy_rhs;
  throw std::invalid_argument("unknown binary op: " + name);
}

ReduceOp parse_reduce_op(const std::string& name) {
  if (name == "sum") return ReduceOp::sum;
  if (name == "max") return ReduceOp::max;
  if (name == "min") return ReduceOp::min;
  throw std::invalid_argument("unknown reduce op: " + name);
}

}  // namespace aggforge
