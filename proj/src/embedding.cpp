#include "jk/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "jk/pegasos.hpp"
#include "jk/mkl.hpp"
#include "jk/rng.hpp"
#include "jk/simd.hpp"

namespace jk {

namespace {

constexpr char kMagic[4] = {'J', 'K', 'E', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

std::size_t role_slot(int role) {
  if (role != 1 && role != 2) throw std::invalid_argument("embedding role must be 1 or 2");
  return static_cast<std::size_t>(role - 1);
}

}  // namespace

std::size_t bits_per_coordinate(double epsilon, double t_scale) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("embedding epsilon must be in (0, 1)");
  const double raw = std::ceil(t_scale * std::log(1.0 / epsilon) / (epsilon * epsilon));
  const auto bits = static_cast<std::size_t>(std::max(raw, 1.0));
  return (bits + 63) / 64 * 64;
}

IntervalEmbedderPair::IntervalEmbedderPair(double epsilon, std::size_t t, std::uint64_t seed)
    : epsilon_(epsilon), t_(t), seed_(seed) {
  if (t_ == 0 || t_ % 64 != 0) throw std::invalid_argument("bits per coordinate must be a positive multiple of 64");
  build_grid();
  const std::size_t words = words_per_row();
  for (int role = 1; role <= 2; ++role) {
    auto& table = tables_[role_slot(role)];
    table.assign(grid_.size() * words, 0);
    Rng rng = make_stream(seed_, Stream::embedding, static_cast<std::uint64_t>(role));
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      const double prob = grid_[g];
      std::uint64_t* row = table.data() + g * words;
      for (std::size_t b = 0; b < t_; ++b) {
        if (uniform01(rng) < prob) row[b / 64] |= std::uint64_t{1} << (b % 64);
      }
    }
  }
}

IntervalEmbedderPair IntervalEmbedderPair::from_tables(double epsilon, std::size_t t,
                                                       std::uint64_t seed,
                                                       std::vector<std::uint64_t> role1,
                                                       std::vector<std::uint64_t> role2) {
  IntervalEmbedderPair out;
  out.epsilon_ = epsilon;
  out.t_ = t;
  out.seed_ = seed;
  if (t == 0 || t % 64 != 0) throw EmbeddingError("bits per coordinate must be a positive multiple of 64");
  out.build_grid();
  const std::size_t expected = out.grid_.size() * out.words_per_row();
  if (role1.size() != expected || role2.size() != expected) {
    throw EmbeddingError("embedding tables have the wrong size for epsilon and t");
  }
  out.tables_ = {std::move(role1), std::move(role2)};
  return out;
}

std::vector<double> IntervalEmbedderPair::make_grid(double epsilon) {
  // Multiples of epsilon/3 in [0, 1], with 1 itself appended.
  const double step = epsilon / 3.0;
  const auto last = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  std::vector<double> grid;
  for (std::size_t k = 0; k <= last; ++k) grid.push_back(std::min(1.0, static_cast<double>(k) * step));
  if (grid.back() < 1.0 - 1e-12) {
    grid.push_back(1.0);
  } else {
    grid.back() = 1.0;
  }
  return grid;
}

std::size_t IntervalEmbedderPair::grid_size(double epsilon) { return make_grid(epsilon).size(); }

void IntervalEmbedderPair::build_grid() { grid_ = make_grid(epsilon_); }

std::size_t IntervalEmbedderPair::grid_index(double x) const {
  if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
    throw std::invalid_argument("embedding input " + std::to_string(x) + " is outside [0, 1]");
  }
  if (x >= 1.0) return grid_.size() - 1;
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), std::max(x, 0.0));
  return static_cast<std::size_t>(it - grid_.begin()) - 1;
}

std::span<const std::uint64_t> IntervalEmbedderPair::row(int role, std::size_t index) const {
  const std::size_t words = words_per_row();
  return {tables_[role_slot(role)].data() + index * words, words};
}

const std::vector<std::uint64_t>& IntervalEmbedderPair::table(int role) const {
  return tables_[role_slot(role)];
}

double IntervalEmbedderPair::max_grid_error() const {
  const double scale = 1.0 / static_cast<double>(t_);
  double worst = 0.0;
  for (std::size_t a = 0; a < grid_.size(); ++a) {
    const auto ra = row(1, a);
    for (std::size_t b = 0; b < grid_.size(); ++b) {
      const double got = static_cast<double>(simd::and_popcount(ra, row(2, b))) * scale;
      worst = std::max(worst, std::abs(grid_[a] * grid_[b] - got));
    }
  }
  return worst;
}

CubeEmbedderPair::CubeEmbedderPair(int n, double epsilon, std::uint64_t requested_seed,
                                   int attempts, IntervalEmbedderPair interval)
    : n_(n), epsilon_(epsilon), requested_seed_(requested_seed), attempts_(attempts),
      interval_(std::move(interval)) {}

CubeEmbedderPair build_pair(int n, double epsilon, std::uint64_t seed,
                            const EmbeddingOptions& options) {
  if (n < 1) throw std::invalid_argument("embedding needs n >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("embedding epsilon must be in (0, 1)");
  if (options.max_attempts < 1) throw std::invalid_argument("embedding needs at least one attempt");
  const double per_coordinate = epsilon / n;
  const std::size_t t = bits_per_coordinate(per_coordinate, options.t_scale);
  const auto width_of = [&](double eps) {
    return static_cast<double>(n) * static_cast<double>(bits_per_coordinate(eps / n, options.t_scale));
  };
  if (width_of(epsilon) > static_cast<double>(options.max_width)) {
    double lo = epsilon, hi = 1.0 - 1e-9;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (width_of(mid) > static_cast<double>(options.max_width) ? lo : hi) = mid;
    }
    std::ostringstream msg;
    msg << "embedding width " << n << " x " << t << " exceeds " << options.max_width
        << " bits; epsilon must be at least " << hi;
    throw EmbeddingError(msg.str());
  }
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    IntervalEmbedderPair interval(per_coordinate, t, seed + static_cast<std::uint64_t>(attempt - 1));
    if (interval.max_grid_error() <= per_coordinate) {
      return CubeEmbedderPair(n, epsilon, seed, attempt, std::move(interval));
    }
  }
  throw EmbeddingError("embedding self-check failed for " + std::to_string(options.max_attempts) +
                       " consecutive seeds");
}

HypercubePoint embed(const CubeEmbedderPair& pair, int role, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(pair.n())) {
    throw std::invalid_argument("embedding expects " + std::to_string(pair.n()) +
                                " coordinates, got " + std::to_string(x.size()));
  }
  const auto& interval = pair.interval();
  const std::size_t words = interval.words_per_row();
  std::vector<std::uint64_t> out(words * x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto r = interval.row(role, interval.grid_index(x[j]));
    std::copy(r.begin(), r.end(), out.begin() + static_cast<std::ptrdiff_t>(j * words));
  }
  return HypercubePoint(pair.width(), std::move(out));
}

namespace {

template <typename T>
void put(std::ostream& os, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const char byte = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
    os.put(byte);
  }
}

template <typename T>
T get(std::istream& is) {
  static_assert(std::is_integral_v<T>);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw EmbeddingError("embedding file is truncated");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

void save_pair(const CubeEmbedderPair& pair, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, kFormatVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(pair.n()));
  put<std::uint64_t>(os, pair.t());
  put<std::uint64_t>(os, std::bit_cast<std::uint64_t>(pair.epsilon()));
  put<std::uint64_t>(os, pair.seed());
  for (int role = 1; role <= 2; ++role) {
    for (std::uint64_t w : pair.interval().table(role)) put<std::uint64_t>(os, w);
  }
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

CubeEmbedderPair load_pair(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw EmbeddingError(path.string() + " is not an embedding file");
  const auto version = get<std::uint32_t>(is);
  if (version != kFormatVersion) {
    throw EmbeddingError("unsupported embedding format version " + std::to_string(version));
  }
  const auto n = static_cast<int>(get<std::uint32_t>(is));
  const auto t = static_cast<std::size_t>(get<std::uint64_t>(is));
  const double epsilon = std::bit_cast<double>(get<std::uint64_t>(is));
  const auto seed = get<std::uint64_t>(is);
  if (n < 1 || !(epsilon > 0.0 && epsilon < 1.0) || t == 0 || t % 64 != 0) {
    throw EmbeddingError("corrupt embedding header in " + path.string());
  }
  const std::size_t count = IntervalEmbedderPair::grid_size(epsilon / n) * (t / 64);
  std::array<std::vector<std::uint64_t>, 2> tables;
  for (auto& table : tables) {
    table.resize(count);
    for (auto& w : table) w = get<std::uint64_t>(is);
  }
  auto interval = IntervalEmbedderPair::from_tables(epsilon / n, t, seed, std::move(tables[0]),
                                                    std::move(tables[1]));
  return CubeEmbedderPair(n, epsilon, seed, 1, std::move(interval));
}

StronglyEuclideanG::StronglyEuclideanG(bool polynomial, std::vector<double> values,
                                       double domain_max, double lipschitz)
    : polynomial_(polynomial), values_(std::move(values)), domain_max_(domain_max),
      lipschitz_(lipschitz) {
  if (values_.empty()) throw std::invalid_argument("g needs at least one coefficient or value");
  if (!(domain_max_ > 0.0)) throw std::invalid_argument("g needs a positive domain");
  if (!(lipschitz_ >= 0.0)) throw std::invalid_argument("g needs a nonnegative Lipschitz constant");
  if (!polynomial_ && values_.size() < 2) throw std::invalid_argument("g table needs two or more values");
  check_lipschitz();
}

StronglyEuclideanG StronglyEuclideanG::polynomial(std::vector<double> coeffs, double domain_max,
                                                  double lipschitz) {
  return StronglyEuclideanG(true, std::move(coeffs), domain_max, lipschitz);
}

StronglyEuclideanG StronglyEuclideanG::table(std::vector<double> values, double domain_max,
                                             double lipschitz) {
  return StronglyEuclideanG(false, std::move(values), domain_max, lipschitz);
}

StronglyEuclideanG StronglyEuclideanG::normalized_quadratic(int n) {
  const double d = static_cast<double>(n);
  return polynomial({0.25, 0.5 / d, 0.25 / (d * d)}, d, 1.0 / d);
}

StronglyEuclideanG StronglyEuclideanG::normalized_linear(int n) {
  const double d = static_cast<double>(n);
  return polynomial({0.0, 1.0 / d}, d, 1.0 / d);
}

StronglyEuclideanG StronglyEuclideanG::constant(double c, double domain_max) {
  return polynomial({c}, domain_max, 0.0);
}

double StronglyEuclideanG::operator()(double a) const {
  if (polynomial_) {
    double v = 0.0;
    for (auto it = values_.rbegin(); it != values_.rend(); ++it) v = v * a + *it;
    return v;
  }
  const double pos = std::clamp(a / domain_max_, 0.0, 1.0) * static_cast<double>(values_.size() - 1);
  const auto lo = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[lo + 1] - values_[lo]);
}

void StronglyEuclideanG::check_lipschitz() const {
  double slope = 0.0;
  if (polynomial_) {
    constexpr int kSamples = 4096;
    for (int i = 0; i <= kSamples; ++i) {
      const double a = domain_max_ * i / kSamples;
      double d = 0.0;
      for (std::size_t k = values_.size(); k-- > 1;) d = d * a + static_cast<double>(k) * values_[k];
      slope = std::max(slope, std::abs(d));
    }
  } else {
    const double h = domain_max_ / static_cast<double>(values_.size() - 1);
    for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
      slope = std::max(slope, std::abs(values_[k + 1] - values_[k]) / h);
    }
  }
  if (slope > lipschitz_ * (1.0 + 1e-6) + 1e-15) {
    throw std::invalid_argument("g has slope " + std::to_string(slope) +
                                ", above its declared Lipschitz constant " + std::to_string(lipschitz_));
  }
}

LiftedKernel::LiftedKernel(StronglyEuclideanG g, std::size_t t) : g_(std::move(g)), t_(t) {
  if (t_ == 0) throw std::invalid_argument("lifted kernel needs t > 0");
}

double LiftedKernel::operator()(const HypercubePoint& u, const HypercubePoint& v) const {
  const double a = static_cast<double>(inner_product(u, v)) / static_cast<double>(t_);
  return g_(std::clamp(a, 0.0, g_.domain_max()));
}

LiftedKernel lift_kernel(const StronglyEuclideanG& g, const CubeEmbedderPair& pair) {
  return LiftedKernel(g, pair.t());
}

CubeModel::CubeModel(CubeEmbedderPair pair, LiftedKernel kernel, std::vector<HypercubePoint> support,
                     std::vector<double> alphas, std::optional<TrainedModel> mkl_model)
    : pair_(std::move(pair)), kernel_(std::move(kernel)), support_(std::move(support)),
      alphas_(std::move(alphas)), mkl_model_(std::move(mkl_model)) {}

double CubeModel::predict(std::span<const double> x) const {
  const HypercubePoint q = embed(pair_, 2, x);
  if (mkl_model_) return mkl_model_->predict(q);
  double f = 0.0;
  for (std::size_t j = 0; j < support_.size(); ++j) {
    if (alphas_[j] != 0.0) f += alphas_[j] * kernel_(support_[j], q);
  }
  return f;
}

CubeModel train_on_cube(std::span<const std::vector<double>> points, std::span<const double> labels,
                        const StronglyEuclideanG& g, double B, double epsilon, std::uint64_t seed,
                        const CubeTrainOptions& options) {
  if (points.empty()) throw std::invalid_argument("train_on_cube: empty sample");
  if (points.size() != labels.size()) throw std::invalid_argument("train_on_cube: points and labels differ in length");
  const int n = static_cast<int>(points.front().size());
  if (!(B > 0.0)) throw std::invalid_argument("train_on_cube: B must be positive");

  CubeEmbedderPair pair = build_pair(n, epsilon, seed, options.embedding);
  LiftedKernel kernel = lift_kernel(g, pair);
  const double lambda = options.lambda_override ? *options.lambda_override : epsilon / (n * B * B);

  std::vector<HypercubePoint> queries, support;
  for (const auto& x : points) {
    queries.push_back(embed(pair, 2, x));
    support.push_back(embed(pair, 1, x));
  }

  if (options.use_mkl) {
    if (pair.width() > 64) {
      throw std::invalid_argument("MKL on the embedded cube needs width n*t <= 64, got " +
                                  std::to_string(pair.width()));
    }
    MklTrainOptions mkl;
    mkl.loss = options.loss;
    mkl.lambda_override = lambda;
    auto result = mkl_train(queries, labels, B, epsilon, mkl);
    CubeModel model(std::move(pair), std::move(kernel), {}, {}, std::move(result.model));
    model.lambda = lambda;
    model.objective = result.objective;
    return model;
  }

  const std::size_t m = points.size();
  DenseMatrix k(m, m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) k(j, i) = kernel(support[j], queries[i]);
  }
  PegasosOptions pegasos{lambda, options.epochs, seed, options.loss};
  auto fit = pegasos_solve(k, labels, pegasos);
  CubeModel model(std::move(pair), std::move(kernel), std::move(support), std::move(fit.alphas),
                  std::nullopt);
  model.lambda = lambda;
  model.objective = fit.objective;
  return model;
}

}  // namespace jk
