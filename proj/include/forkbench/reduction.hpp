#pragma once

#include <algorithm>
#include <limits>
#include <string_view>
#include <type_traits>

namespace forkbench {

enum class ReductionOp { Sum, Prod, Max, Min };

std::string_view to_string(ReductionOp op) noexcept;
ReductionOp parse_reduction_op(std::string_view name);

template <class T>
constexpr T identity(ReductionOp op) {
  static_assert(std::is_arithmetic_v<T>);
  switch (op) {
    case ReductionOp::Sum:
      return T(0);
    case ReductionOp::Prod:
      return T(1);
    case ReductionOp::Max:
      if constexpr (std::numeric_limits<T>::has_infinity) return -std::numeric_limits<T>::infinity();
      else return std::numeric_limits<T>::lowest();
    case ReductionOp::Min:
      if constexpr (std::numeric_limits<T>::has_infinity) return std::numeric_limits<T>::infinity();
      else return std::numeric_limits<T>::max();
  }
  return T(0);
}

template <class T>
constexpr T combine(ReductionOp op, T lhs, T rhs) {
  switch (op) {
    case ReductionOp::Sum:
      return lhs + rhs;
    case ReductionOp::Prod:
      return lhs * rhs;
    case ReductionOp::Max:
      return std::max(lhs, rhs);
    case ReductionOp::Min:
      return std::min(lhs, rhs);
  }
  return lhs;
}

}  // namespace forkbench
