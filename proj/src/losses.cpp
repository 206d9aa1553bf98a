#include "jk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jk {

std::string_view LossSpec::name() const noexcept {
  return kind_ == LossKind::hinge ? "hinge" : "absolute";
}

double LossSpec::value(double z, double y) const noexcept {
  if (kind_ == LossKind::hinge) return std::max(0.0, 1.0 - y * z);
  return std::abs(z - y);
}

double LossSpec::subgradient(double z, double y) const noexcept {
  if (kind_ == LossKind::hinge) return (y * z < 1.0) ? -y : 0.0;
  if (z > y) return 1.0;
  if (z < y) return -1.0;
  return 0.0;
}

DualBox LossSpec::domain(double y) const noexcept {
  if (kind_ == LossKind::hinge) {
    return y >= 0.0 ? DualBox{-y, 0.0} : DualBox{0.0, -y};
  }
  return {-1.0, 1.0};
}

double LossSpec::conjugate(double a, double y) const noexcept {
  const DualBox box = domain(y);
  constexpr double slack = 1e-9;
  if (a < box.lo - slack || a > box.hi + slack) return std::numeric_limits<double>::infinity();
  return a * y;
}

LossSpec parse_loss(std::string_view name) {
  if (name == "hinge") return LossSpec::hinge();
  if (name == "abs" || name == "absolute") return LossSpec::absolute();
  throw std::invalid_argument("unknown loss '" + std::string(name) + "' (use hinge or abs)");
}

}  // namespace jk
