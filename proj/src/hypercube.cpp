#include "jk/hypercube.hpp"

#include <stdexcept>

#include "jk/simd.hpp"

namespace jk {

HypercubePoint::HypercubePoint(std::size_t dim) : dim_(dim), words_(word_count(dim), 0) {}

HypercubePoint::HypercubePoint(std::size_t dim, std::vector<std::uint64_t> words)
    : dim_(dim), words_(std::move(words)) {
  if (words_.size() != word_count(dim)) {
    throw std::invalid_argument("HypercubePoint: " + std::to_string(words_.size()) +
                                " words cannot hold dimension " + std::to_string(dim));
  }
  finish();
}

void HypercubePoint::finish() {
  if (dim_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (dim_ % 64)) - 1;
  }
  weight_ = simd::popcount(words_);
}

HypercubePoint HypercubePoint::parse(std::string_view bits) {
  HypercubePoint out(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      out.words_[i / 64] |= std::uint64_t{1} << (i % 64);
    } else if (bits[i] != '0') {
      throw std::invalid_argument("bit string may only contain '0' and '1', found '" +
                                  std::string(1, bits[i]) + "'");
    }
  }
  out.finish();
  return out;
}

HypercubePoint HypercubePoint::from_mask(std::uint64_t mask, std::size_t dim) {
  if (dim > 64) throw std::invalid_argument("from_mask: dimension above 64");
  return HypercubePoint(dim, std::vector<std::uint64_t>(word_count(dim), mask));
}

std::string HypercubePoint::to_string() const {
  std::string s(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

HypercubePoint HypercubePoint::complemented() const {
  std::vector<std::uint64_t> w(words_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = ~words_[i];
  return HypercubePoint(dim_, std::move(w));
}

std::size_t inner_product(const HypercubePoint& x, const HypercubePoint& y) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("inner_product: dimensions " + std::to_string(x.dim()) + " and " +
                                std::to_string(y.dim()) + " differ");
  }
  return simd::and_popcount(x.words(), y.words());
}

}  // namespace jk
