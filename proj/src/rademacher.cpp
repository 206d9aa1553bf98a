#include "jk/rademacher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "jk/kernels.hpp"
#include "jk/mkl.hpp"
#include "jk/rng.hpp"

namespace jk {

double rademacher_bound(int n, std::size_t m, double B) {
  if (n < 1 || m == 0) throw std::invalid_argument("rademacher_bound: need n >= 1 and m >= 1");
  return std::sqrt(2.0 * std::numbers::e * B * B * std::log(static_cast<double>(n)) /
                   static_cast<double>(m));
}

namespace {

struct LayerData {
  int p = 0;
  std::vector<std::size_t> members;
  // Inner products between members, shifted onto the canonical layer.
  std::vector<std::size_t> inner;
  std::vector<std::vector<double>> vertex_tables;
  std::size_t table_size = 0;
};

}  // namespace

RademacherEstimate rademacher_estimate(std::span<const HypercubePoint> points, double B,
                                       int trials, std::uint64_t seed) {
  if (points.empty()) throw std::invalid_argument("rademacher_estimate: empty sample");
  if (trials < 1) throw std::invalid_argument("rademacher_estimate: need at least one trial");
  if (!(B > 0.0)) throw std::invalid_argument("rademacher_estimate: B must be positive");
  const int n = static_cast<int>(points.front().dim());
  const std::size_t m = points.size();

  std::map<int, LayerData> layers;
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].dim() != points.front().dim()) {
      throw std::invalid_argument("rademacher_estimate: mixed point dimensions");
    }
    layers[static_cast<int>(points[i].weight())].members.push_back(i);
  }
  for (auto& [p, data] : layers) {
    data.p = p;
    const std::size_t shift = 2 * p > n ? static_cast<std::size_t>(2 * p - n) : 0;
    const std::size_t mp = data.members.size();
    data.inner.resize(mp * mp);
    for (std::size_t a = 0; a < mp; ++a) {
      for (std::size_t b = 0; b < mp; ++b) {
        data.inner[a * mp + b] = inner_product(points[data.members[a]], points[data.members[b]]) - shift;
      }
    }
    for (const auto& vk : vertex_kernels({n, p})) data.vertex_tables.push_back(vk.g_table);
    data.table_size = data.vertex_tables.front().size();
  }

  Rng rng = make_stream(seed, Stream::rademacher);
  std::vector<double> sigma(m);
  std::vector<double> histogram;
  std::map<int, double> layer_sup;
  double sum = 0.0, sum_sq = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    for (double& s : sigma) s = rademacher_sign(rng);
    double total = 0.0;
    for (auto& [p, data] : layers) {
      // sigma^T K sigma = sum_k g(k) * (signed count of pairs at inner product k).
      histogram.assign(data.table_size, 0.0);
      const std::size_t mp = data.members.size();
      for (std::size_t a = 0; a < mp; ++a) {
        const double sa = sigma[data.members[a]];
        for (std::size_t b = 0; b < mp; ++b) {
          histogram[data.inner[a * mp + b]] += sa * sigma[data.members[b]];
        }
      }
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& table : data.vertex_tables) {
        double q = 0.0;
        for (std::size_t k = 0; k < table.size(); ++k) q += table[k] * histogram[k];
        if (q > best) best = q;  // strict: lowest index wins ties
      }
      best = std::max(best, 0.0);
      layer_sup[p] += best;
      total += best;
    }
    const double estimate = B / static_cast<double>(m) * std::sqrt(total);
    sum += estimate;
    sum_sq += estimate * estimate;
  }

  RademacherEstimate out;
  out.trials = trials;
  out.mean = sum / trials;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - trials * out.mean * out.mean) / (trials - 1)) : 0.0;
  out.stderr_mean = std::sqrt(var / trials);
  out.bound = rademacher_bound(n, m, B);
  double norm = 0.0;
  for (const auto& [p, s] : layer_sup) norm += s;
  for (const auto& [p, s] : layer_sup) {
    out.layer_allocation[p] = norm > 0.0 ? B * std::sqrt(s / norm) : 0.0;
  }
  return out;
}

}  // namespace jk
