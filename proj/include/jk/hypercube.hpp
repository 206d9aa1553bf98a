#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace jk {

/// A point of {0,1}^dim packed into 64-bit words, coordinate i in bit i % 64
/// of word i / 64. Unused high bits of the last word are always zero.
class HypercubePoint {
 public:
  HypercubePoint() = default;
  explicit HypercubePoint(std::size_t dim);
  HypercubePoint(std::size_t dim, std::vector<std::uint64_t> words);

  /// Parses '0'/'1' characters; character i is coordinate i.
  static HypercubePoint parse(std::string_view bits);
  static HypercubePoint from_mask(std::uint64_t mask, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t weight() const noexcept { return weight_; }
  bool test(std::size_t i) const noexcept { return (words_[i / 64] >> (i % 64)) & 1U; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  std::string to_string() const;
  HypercubePoint complemented() const;

  friend bool operator==(const HypercubePoint& a, const HypercubePoint& b) noexcept {
    return a.dim_ == b.dim_ && a.words_ == b.words_;
  }

 private:
  void finish();

  std::size_t dim_ = 0;
  std::size_t weight_ = 0;
  std::vector<std::uint64_t> words_;
};

/// <x, y> = popcount(x & y). Throws std::invalid_argument on a dimension
/// mismatch.
std::size_t inner_product(const HypercubePoint& x, const HypercubePoint& y);

inline std::size_t word_count(std::size_t dim) noexcept { return (dim + 63) / 64; }

}  // namespace jk
