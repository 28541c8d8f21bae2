#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>

namespace aggforge {

// Element-wise combine operator applied to (vertex, edge) feature pairs.
// copy_lhs ignores the edge operand, copy_rhs ignores the vertex operand.
enum class BinaryOp { add, sub, mul, div, copy_lhs, copy_rhs };

// Element-wise reduction folding combined values into the output row.
enum class ReduceOp { sum, max, min };

struct OperatorSpec {
  BinaryOp binary = BinaryOp::copy_lhs;
  ReduceOp reduce = ReduceOp::sum;
  friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

// Whether the spec reads the edge-feature matrix at all.
constexpr bool uses_edge_operand(BinaryOp b) {
  return b != BinaryOp::copy_lhs;
}

constexpr std::array<BinaryOp, 6> kAllBinaryOps = {
    BinaryOp::add, BinaryOp::sub,      BinaryOp::mul,
    BinaryOp::div, BinaryOp::copy_lhs, BinaryOp::copy_rhs};
constexpr std::array<ReduceOp, 3> kAllReduceOps = {ReduceOp::sum, ReduceOp::max,
                                                   ReduceOp::min};

template <typename T>
T apply_binary(BinaryOp op, T x, T y) {
  switch (op) {
    case BinaryOp::add: return x + y;
    case BinaryOp::sub: return x - y;
    case BinaryOp::mul: return x * y;
    case BinaryOp::div:
      if (y == T{}) throw std::domain_error("apply_binary: division by zero");
      return x / y;
    case BinaryOp::copy_lhs: return x;
    case BinaryOp::copy_rhs: return y;
  }
  throw std::logic_error("apply_binary: bad op");
}

template <typename T>
T apply_reduce(ReduceOp op, T acc, T v) {
  switch (op) {
    case ReduceOp::sum: return acc + v;
    case ReduceOp::max: return v > acc ? v : acc;
    case ReduceOp::min: return v < acc ? v : acc;
  }
  throw std::logic_error("apply_reduce: bad op");
}

// Neutral element of the reduction: 0 for sum, -inf for max, +inf for min
// (numeric limits for integer types).
template <typename T>
T reduce_identity(ReduceOp op) {
  switch (op) {
    case ReduceOp::sum: return T{};
    case ReduceOp::max:
      return std::numeric_limits<T>::has_infinity ? -std::numeric_limits<T>::infinity()
                                                  : std::numeric_limits<T>::lowest();
    case ReduceOp::min:
      return std::numeric_limits<T>::has_infinity ? std::numeric_limits<T>::infinity()
                                                  : std::numeric_limits<T>::max();
  }
  throw std::logic_error("reduce_identity: bad op");
}

// One scalar step of the primitive: fold combine(x, y) into z.
template <typename T>
T apply_elem(const OperatorSpec& spec, T x, T y, T z) {
  return apply_reduce(spec.reduce, z, apply_binary(spec.binary, x, y));
}

std::string to_string(BinaryOp op);
std::string to_string(ReduceOp op);
BinaryOp parse_binary_op(const std::string& name);
ReduceOp parse_reduce_op(const std::string& name);

}  // namespace aggforge
