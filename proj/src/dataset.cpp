#include "jk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace jk {

using Json = nlohmann::json;

bool Dataset::binary() const {
  return std::all_of(examples.begin(), examples.end(),
                     [](const Example& e) { return std::holds_alternative<HypercubePoint>(e.x); });
}

std::vector<HypercubePoint> Dataset::points() const {
  std::vector<HypercubePoint> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    const auto* p = std::get_if<HypercubePoint>(&e.x);
    if (p == nullptr) throw std::invalid_argument("dataset has real-valued points; expected bit strings");
    out.push_back(*p);
  }
  return out;
}

std::vector<std::vector<double>> Dataset::real_points() const {
  std::vector<std::vector<double>> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    const auto* p = std::get_if<std::vector<double>>(&e.x);
    if (p == nullptr) throw std::invalid_argument("dataset has bit-string points; expected real vectors");
    out.push_back(*p);
  }
  return out;
}

std::vector<double> Dataset::labels() const {
  std::vector<double> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.y);
  return out;
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto dim = std::visit(
        [](const auto& x) -> std::size_t {
          if constexpr (std::is_same_v<std::decay_t<decltype(x)>, HypercubePoint>) {
            return x.dim();
          } else {
            return x.size();
          }
        },
        examples[i].x);
    if (dim != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("example " + std::to_string(i) + " has dimension " +
                                  std::to_string(dim) + ", dataset has " + std::to_string(n));
    }
    if (!std::isfinite(examples[i].y)) {
      throw std::invalid_argument("example " + std::to_string(i) + " has a non-finite label");
    }
  }
}

Dataset read_dataset(std::istream& is) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  bool dim_known = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw std::invalid_argument("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("meta")) {
      data.meta = j.at("meta");
      continue;
    }
    Example ex;
    const Json& x = j.at("x");
    if (x.is_string()) {
      ex.x = HypercubePoint::parse(x.get<std::string>());
    } else {
      ex.x = x.get<std::vector<double>>();
    }
    ex.y = j.at("y").get<double>();
    const auto dim = std::holds_alternative<HypercubePoint>(ex.x)
                         ? std::get<HypercubePoint>(ex.x).dim()
                         : std::get<std::vector<double>>(ex.x).size();
    if (!dim_known) {
      data.n = static_cast<int>(dim);
      dim_known = true;
    }
    data.examples.push_back(std::move(ex));
  }
  if (!dim_known && data.meta.contains("params")) data.n = data.meta["params"].value("n", 0);
  data.validate();
  return data;
}

void write_dataset(const Dataset& data, std::ostream& os) {
  if (!data.meta.empty()) os << Json{{"meta", data.meta}}.dump() << '\n';
  for (const auto& e : data.examples) {
    Json j;
    if (const auto* p = std::get_if<HypercubePoint>(&e.x)) {
      j["x"] = p->to_string();
    } else {
      j["x"] = std::get<std::vector<double>>(e.x);
    }
    j["y"] = e.y;
    os << j.dump() << '\n';
  }
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(is);
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_dataset(data, os);
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::vector<double> to_signed_labels(std::span<const double> labels) {
  std::vector<double> out;
  out.reserve(labels.size());
  for (double y : labels) {
    if (y == 0.0 || y == -1.0) {
      out.push_back(-1.0);
    } else if (y == 1.0) {
      out.push_back(1.0);
    } else {
      throw std::invalid_argument("classification labels must be 0/1 or -1/+1, found " + std::to_string(y));
    }
  }
  return out;
}

double conjunction_value(std::span<const int> literals, const HypercubePoint& x) {
  for (int i : literals) {
    if (!x.test(static_cast<std::size_t>(i))) return 0.0;
  }
  return 1.0;
}

HypercubePoint conjunction_indicator(int n, std::span<const int> literals) {
  std::string bits(static_cast<std::size_t>(n), '0');
  for (int i : literals) {
    if (i < 0 || i >= n) throw std::invalid_argument("literal " + std::to_string(i) + " is out of range");
    bits[static_cast<std::size_t>(i)] = '1';
  }
  return HypercubePoint::parse(bits);
}

HypercubePoint random_layer_point(int n, int p, Rng& rng) {
  if (p < 0 || p > n) throw std::invalid_argument("random_layer_point: need 0 <= p <= n");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::string bits(static_cast<std::size_t>(n), '0');
  // Partial Fisher-Yates: the first p slots are a uniform p-subset.
  for (int k = 0; k < p; ++k) {
    const auto j = k + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - k)));
    std::swap(idx[k], idx[j]);
    bits[static_cast<std::size_t>(idx[k])] = '1';
  }
  return HypercubePoint::parse(bits);
}

std::vector<int> random_literals(int n, int count, std::uint64_t seed) {
  if (count < 0 || count > n) throw std::invalid_argument("random_literals: need 0 <= count <= n");
  Rng rng = make_stream(seed, Stream::literals);
  const HypercubePoint pick = random_layer_point(n, count, rng);
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (pick.test(static_cast<std::size_t>(i))) out.push_back(i);
  }
  return out;
}

namespace {

std::string_view mode_name(SamplingMode mode) {
  return mode == SamplingMode::sparse ? "sparse" : "uniform_layer";
}

}  // namespace

Dataset gen_conjunction_dataset(const ConjunctionTask& task, std::size_t m, std::uint64_t seed,
                                Stream stream) {
  if (task.n < 1 || task.n > 64) throw std::invalid_argument("conjunction task needs 1 <= n <= 64");
  if (task.weight < 0 || task.weight > task.n) {
    throw std::invalid_argument("conjunction task weight must lie in [0, n]");
  }
  if (!(task.noise_rate >= 0.0 && task.noise_rate <= 1.0)) {
    throw std::invalid_argument("noise rate must lie in [0, 1]");
  }
  std::vector<int> literals = task.literals;
  std::sort(literals.begin(), literals.end());
  if (std::adjacent_find(literals.begin(), literals.end()) != literals.end()) {
    throw std::invalid_argument("conjunction literals must be distinct");
  }
  for (int i : literals) {
    if (i < 0 || i >= task.n) throw std::invalid_argument("literal " + std::to_string(i) + " is out of range");
  }

  Dataset data;
  data.n = task.n;
  data.meta = {{"generator", "conjunction"},
               {"seed", seed},
               {"stream", static_cast<std::uint64_t>(stream)},
               {"params",
                {{"n", task.n},
                 {"literals", literals},
                 {"mode", std::string(mode_name(task.mode))},
                 {"weight", task.weight},
                 {"noise_rate", task.noise_rate},
                 {"m", m}}},
               {"labels", "{0,1}"}};
  if (task.weight < static_cast<int>(literals.size())) {
    data.meta["warning"] = "layer weight below the number of literals; every label is 0";
  }

  Rng rng = make_stream(seed, stream);
  Rng noise = make_stream(seed, Stream::noise, static_cast<std::uint64_t>(stream));
  data.examples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    HypercubePoint x = random_layer_point(task.n, task.weight, rng);
    double y = conjunction_value(literals, x);
    if (task.noise_rate > 0.0 && uniform01(noise) < task.noise_rate) y = 1.0 - y;
    data.examples.push_back({std::move(x), y});
  }
  return data;
}

Dataset regenerate_dataset(const nlohmann::json& meta) {
  if (meta.value("generator", "") != "conjunction") {
    throw std::invalid_argument("dataset meta does not name a known generator");
  }
  const auto& params = meta.at("params");
  ConjunctionTask task;
  task.n = params.at("n").get<int>();
  task.literals = params.at("literals").get<std::vector<int>>();
  task.mode = params.at("mode").get<std::string>() == "sparse" ? SamplingMode::sparse
                                                               : SamplingMode::uniform_layer;
  task.weight = params.at("weight").get<int>();
  task.noise_rate = params.at("noise_rate").get<double>();
  return gen_conjunction_dataset(task, params.at("m").get<std::size_t>(),
                                 meta.at("seed").get<std::uint64_t>(),
                                 static_cast<Stream>(meta.at("stream").get<std::uint64_t>()));
}

}  // namespace jk
