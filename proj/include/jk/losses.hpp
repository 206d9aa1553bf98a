#pragma once

#include <string_view>

namespace jk {

enum class LossKind { hinge, absolute };

/// Interval [lo, hi] of dual values a with a finite conjugate.
struct DualBox {
  double lo = 0.0;
  double hi = 0.0;
};

/// A 1-Lipschitz convex loss l(z, y) with its Fenchel conjugate in z.
///   hinge:    l = max(0, 1 - y z),  l*(a, y) = a y  on  a y in [-1, 0]
///   absolute: l = |z - y|,          l*(a, y) = a y  on  |a| <= 1
/// Hinge labels must be +-1.
class LossSpec {
 public:
  constexpr explicit LossSpec(LossKind kind = LossKind::hinge) noexcept : kind_(kind) {}

  static constexpr LossSpec hinge() noexcept { return LossSpec(LossKind::hinge); }
  static constexpr LossSpec absolute() noexcept { return LossSpec(LossKind::absolute); }

  LossKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  double value(double z, double y) const noexcept;
  double subgradient(double z, double y) const noexcept;

  /// +inf outside domain(y).
  double conjugate(double a, double y) const noexcept;
  DualBox domain(double y) const noexcept;

  friend bool operator==(LossSpec, LossSpec) = default;

 private:
  LossKind kind_;
};

/// Accepts "hinge", "abs" and "absolute".
LossSpec parse_loss(std::string_view name);

}  // namespace jk
