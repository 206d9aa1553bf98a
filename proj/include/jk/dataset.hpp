#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "jk/hypercube.hpp"
#include "jk/rng.hpp"

// Datasets are JSON Lines: an optional first line {"meta": {...}} followed
// by one {"x": "0110..." | [floats], "y": float} object per example.

namespace jk {

using Features = std::variant<HypercubePoint, std::vector<double>>;

struct Example {
  Features x;
  double y = 0.0;
};

struct Dataset {
  int n = 0;
  std::vector<Example> examples;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t size() const noexcept { return examples.size(); }
  bool binary() const;

  /// Throws std::invalid_argument when any example is real-valued.
  std::vector<HypercubePoint> points() const;
  /// Throws std::invalid_argument when any example is a bit string.
  std::vector<std::vector<double>> real_points() const;
  std::vector<double> labels() const;

  /// Every point has dimension n and every label is finite.
  void validate() const;
};

Dataset read_dataset(std::istream& is);
void write_dataset(const Dataset& data, std::ostream& os);
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& data, const std::filesystem::path& path);

/// {0,1} labels to {-1,+1}; +-1 labels pass through.
std::vector<double> to_signed_labels(std::span<const double> labels);

enum class SamplingMode { uniform_layer, sparse };

struct ConjunctionTask {
  int n = 0;
  std::vector<int> literals;
  SamplingMode mode = SamplingMode::sparse;
  /// Layer p (uniform_layer) or support size s (sparse).
  int weight = 0;
  double noise_rate = 0.0;
};

/// c_I(x) = 1 when every literal of I is set in x.
double conjunction_value(std::span<const int> literals, const HypercubePoint& x);

/// The bit vector with ones exactly at the literals.
HypercubePoint conjunction_indicator(int n, std::span<const int> literals);

/// Uniform point of weight p in {0,1}^n.
HypercubePoint random_layer_point(int n, int p, Rng& rng);

/// count distinct literals out of n, sorted, drawn from the literal stream.
std::vector<int> random_literals(int n, int count, std::uint64_t seed);

/// m points uniform on the task's layer with labels c_I(x) in {0,1}, each
/// flipped with probability noise_rate. A layer below |I| yields all-zero
/// labels and a "warning" entry in meta.
Dataset gen_conjunction_dataset(const ConjunctionTask& task, std::size_t m, std::uint64_t seed,
                                Stream stream = Stream::data);

/// Rebuilds a generated dataset from its meta record.
Dataset regenerate_dataset(const nlohmann::json& meta);

}  // namespace jk
