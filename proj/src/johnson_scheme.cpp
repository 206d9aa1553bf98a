#include "jk/johnson_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jk/binomial.hpp"

namespace jk {

void LayerParams::validate() const {
  if (n < 0 || n > 64 || p < 0 || p > n) {
    throw std::invalid_argument("invalid layer " + to_string(*this) +
                                ": need 0 <= p <= n <= 64");
  }
}

std::string to_string(const LayerParams& layer) {
  return "(n=" + std::to_string(layer.n) + ", p=" + std::to_string(layer.p) + ")";
}

void BetaCoeffs::validate() const {
  layer.validate();
  if (beta.size() != layer.size()) {
    throw std::invalid_argument("beta for layer " + to_string(layer) + " needs " +
                                std::to_string(layer.size()) + " entries, got " +
                                std::to_string(beta.size()));
  }
}

DeltaMatrix::DeltaMatrix(LayerParams layer, DenseMatrix entries)
    : layer_(layer), entries_(std::move(entries)) {
  if (entries_.rows() != layer_.size() || entries_.cols() != layer_.size()) {
    throw std::invalid_argument("delta matrix shape does not match layer " + to_string(layer_));
  }
}

std::string Admissibility::violation() const {
  if (admissible) return {};
  if (negative_eigenspace) {
    return "negative eigenvalue on eigenspace " + std::to_string(*negative_eigenspace);
  }
  if (diagonal_exceeded) return "diagonal value " + std::to_string(diagonal) + " exceeds 1";
  return "inadmissible";
}

namespace {

void require_canonical(const LayerParams& layer, const char* what) {
  layer.validate();
  if (!layer.canonical()) {
    throw std::invalid_argument(std::string(what) + " needs p <= n/2; complement layer " +
                                to_string(layer) + " first");
  }
}

double inner(std::span<const double> a, std::span<const double> b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

DeltaMatrix delta_matrix(const LayerParams& layer) {
  require_canonical(layer, "delta_matrix");
  const int n = layer.n;
  const int p = layer.p;
  DenseMatrix d(layer.size(), layer.size());
  for (int j = 0; j <= p; ++j) {
    for (int l = j; l <= p; ++l) {
      d(j, l) = binomial(n - l - j, p - l) * binomial(p - j, l - j);
    }
  }
  return DeltaMatrix(layer, std::move(d));
}

EtaVector eta_vector(const LayerParams& layer) {
  layer.validate();
  EtaVector out{layer, std::vector<double>(layer.size())};
  for (int l = 0; l <= layer.p; ++l) out.eta[l] = binomial(layer.p, l);
  return out;
}

EigenProfile eigen_profile(const DeltaMatrix& delta, std::span<const double> beta) {
  if (beta.size() != delta.size()) {
    throw std::invalid_argument("eigen_profile: beta has " + std::to_string(beta.size()) +
                                " entries, layer needs " + std::to_string(delta.size()));
  }
  EigenProfile out{delta.layer(), std::vector<double>(delta.size(), 0.0)};
  for (std::size_t j = 0; j < delta.size(); ++j) {
    long double s = 0.0L;
    for (std::size_t l = j; l < delta.size(); ++l) s += static_cast<long double>(delta(j, l)) * beta[l];
    out.lambdas[j] = static_cast<double>(s);
  }
  return out;
}

EigenProfile eigen_profile(const BetaCoeffs& beta) {
  beta.validate();
  return eigen_profile(delta_matrix(beta.layer), beta.beta);
}

Admissibility check_admissible(std::span<const double> beta, const DeltaMatrix& delta,
                               const EtaVector& eta, double tol) {
  if (eta.eta.size() != delta.size()) {
    throw std::invalid_argument("check_admissible: eta and delta sizes differ");
  }
  Admissibility out;
  out.profile = eigen_profile(delta, beta);
  double scale = 1.0;
  for (double v : out.profile.lambdas) scale = std::max(scale, std::abs(v));
  // Alternating coefficients cancel for large n, so each sum also gets a
  // rounding allowance proportional to the magnitude of its terms.
  for (std::size_t j = 0; j < out.profile.lambdas.size(); ++j) {
    double terms = 0.0;
    for (std::size_t l = j; l < delta.size(); ++l) terms += std::abs(delta(j, l) * beta[l]);
    if (out.profile.lambdas[j] < -tol * scale - kRoundingSlack * terms) {
      out.negative_eigenspace = static_cast<int>(j);
      break;
    }
  }
  out.diagonal = inner(eta.eta, beta);
  double terms = 0.0;
  for (std::size_t l = 0; l < beta.size(); ++l) terms += std::abs(eta.eta[l] * beta[l]);
  out.diagonal_exceeded = out.diagonal > 1.0 + tol + kRoundingSlack * terms;
  out.admissible = !out.negative_eigenspace && !out.diagonal_exceeded;
  return out;
}

Admissibility check_admissible(const BetaCoeffs& beta, double tol) {
  beta.validate();
  require_canonical(beta.layer, "check_admissible");
  return check_admissible(beta.beta, delta_matrix(beta.layer), eta_vector(beta.layer), tol);
}

bool is_admissible(const BetaCoeffs& beta, double tol) {
  return check_admissible(beta, tol).admissible;
}

std::vector<double> solve_upper(const DeltaMatrix& delta, std::span<const double> rhs) {
  const std::size_t size = delta.size();
  if (rhs.size() != size) throw std::invalid_argument("solve_upper: size mismatch");
  // Extended precision: the alternating solutions cancel heavily for large n.
  std::vector<long double> x(size, 0.0L);
  for (std::size_t k = size; k-- > 0;) {
    long double s = rhs[k];
    for (std::size_t l = k + 1; l < size; ++l) s -= static_cast<long double>(delta(k, l)) * x[l];
    if (delta(k, k) == 0.0) throw std::domain_error("solve_upper: zero pivot");
    x[k] = s / static_cast<long double>(delta(k, k));
  }
  return {x.begin(), x.end()};
}

namespace {

// Exact for every r <= 64: all such coefficients fit the 64-bit mantissa.
long double binomial_ld(long long r, long long k) {
  if (k < 0 || k > r) return 0.0L;
  k = std::min(k, r - k);
  unsigned __int128 acc = 1;
  for (long long i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(r - k + i) / static_cast<unsigned __int128>(i);
  }
  return static_cast<long double>(acc);
}

using LdMatrix = std::vector<std::vector<long double>>;

struct Vertices {
  std::vector<BetaCoeffs> betas;
  std::vector<std::vector<double>> tables;
};

// Back-substitution for every unit vector, then normalisation to unit
// diagonal. check_delta is the double table the residual is measured against.
Vertices vertices_from(const LayerParams& layer, const LdMatrix& delta,
                       const std::vector<long double>& eta, const DeltaMatrix& check_delta) {
  const std::size_t size = delta.size();
  const double delta_norm = check_delta.entries().max_abs();
  Vertices out;
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<long double> x(size, 0.0L);
    for (std::size_t k = size; k-- > 0;) {
      long double acc = (k == i) ? 1.0L : 0.0L;
      for (std::size_t l = k + 1; l < size; ++l) acc -= delta[k][l] * x[l];
      if (delta[k][k] == 0.0L) throw std::domain_error("vertex_betas: zero pivot");
      x[k] = acc / delta[k][k];
    }

    double residual = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
      long double row = 0.0L;
      for (std::size_t l = j; l < size; ++l) row += delta[j][l] * x[l];
      residual = std::max(residual, static_cast<double>(std::abs(row - (j == i ? 1.0L : 0.0L))));
    }
    if (residual > 1e-9 * delta_norm) {
      throw std::runtime_error("vertex_betas: back-substitution residual " +
                               std::to_string(residual) + " on layer " + to_string(layer));
    }

    long double xi = 0.0L;
    for (std::size_t l = 0; l < size; ++l) xi += eta[l] * x[l];
    if (!(xi > 0.0L)) {
      throw std::runtime_error("vertex_betas: nonpositive normalizer for vertex " +
                               std::to_string(i) + " on layer " + to_string(layer));
    }
    std::vector<double> beta(size), table(size);
    for (std::size_t l = 0; l < size; ++l) x[l] /= xi;
    for (std::size_t k = 0; k < size; ++k) {
      long double g = 0.0L;
      for (std::size_t l = 0; l <= k; ++l) g += binomial_ld(static_cast<long long>(k), static_cast<long long>(l)) * x[l];
      beta[k] = static_cast<double>(x[k]);
      table[k] = static_cast<double>(g);
    }
    out.betas.push_back(BetaCoeffs{layer, std::move(beta)});
    out.tables.push_back(std::move(table));
  }
  return out;
}

// Integer map from kernel values to eigenvalues: Delta times the inverse
// binomial basis change. Entries are bounded by orbit sizes, so applying it
// to bounded values does not cancel the way the coefficient route does.
LdMatrix value_to_profile(const LayerParams& layer) {
  const int n = layer.n;
  const int p = layer.p;
  auto exact = [](long long r, long long k) -> __int128 {
    if (k < 0 || k > r) return 0;
    k = std::min(k, r - k);
    unsigned __int128 acc = 1;
    for (long long i = 1; i <= k; ++i) acc = acc * static_cast<unsigned __int128>(r - k + i) / static_cast<unsigned __int128>(i);
    return static_cast<__int128>(acc);
  };
  LdMatrix m(layer.size(), std::vector<long double>(layer.size(), 0.0L));
  for (int j = 0; j <= p; ++j) {
    for (int k = 0; k <= p; ++k) {
      __int128 acc = 0;
      for (int l = std::max(j, k); l <= p; ++l) {
        const __int128 term = exact(n - l - j, p - l) * exact(p - j, l - j) * exact(l, k);
        acc += ((l - k) % 2 == 0) ? term : -term;
      }
      m[j][k] = static_cast<long double>(acc);
    }
  }
  return m;
}

Vertices exact_vertices(const LayerParams& layer) {
  require_canonical(layer, "vertex_betas");
  const int n = layer.n;
  const int p = layer.p;
  LdMatrix d(layer.size(), std::vector<long double>(layer.size(), 0.0L));
  std::vector<long double> eta(layer.size());
  for (int j = 0; j <= p; ++j) {
    eta[j] = binomial_ld(p, j);
    for (int l = j; l <= p; ++l) d[j][l] = binomial_ld(n - l - j, p - l) * binomial_ld(p - j, l - j);
  }
  return vertices_from(layer, d, eta, delta_matrix(layer));
}

}  // namespace

std::vector<BetaCoeffs> vertex_betas(const DeltaMatrix& delta, const EtaVector& eta) {
  const std::size_t size = delta.size();
  if (eta.eta.size() != size) throw std::invalid_argument("vertex_betas: eta size mismatch");
  LdMatrix d(size, std::vector<long double>(size, 0.0L));
  for (std::size_t j = 0; j < size; ++j) {
    for (std::size_t l = 0; l < size; ++l) d[j][l] = delta(j, l);
  }
  return vertices_from(delta.layer(), d, {eta.eta.begin(), eta.eta.end()}, delta).betas;
}

EigenProfile eigen_profile_from_values(const LayerParams& layer, std::span<const double> values) {
  require_canonical(layer, "eigen_profile_from_values");
  if (values.size() != layer.size()) {
    throw std::invalid_argument("eigen_profile_from_values: expected " + std::to_string(layer.size()) + " values");
  }
  const auto m = value_to_profile(layer);
  EigenProfile out{layer, std::vector<double>(layer.size(), 0.0)};
  for (std::size_t j = 0; j < m.size(); ++j) {
    long double s = 0.0L;
    for (std::size_t k = 0; k < m.size(); ++k) s += m[j][k] * values[k];
    out.lambdas[j] = static_cast<double>(s);
  }
  return out;
}

Admissibility check_admissible_values(const LayerParams& layer, std::span<const double> values,
                                      double tol) {
  Admissibility out;
  out.profile = eigen_profile_from_values(layer, values);
  const auto m = value_to_profile(layer);
  double scale = 1.0;
  for (double v : out.profile.lambdas) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < m.size(); ++j) {
    double terms = 0.0;
    for (std::size_t k = 0; k < m.size(); ++k) terms += std::abs(static_cast<double>(m[j][k]) * values[k]);
    if (out.profile.lambdas[j] < -tol * scale - kRoundingSlack * terms) {
      out.negative_eigenspace = static_cast<int>(j);
      break;
    }
  }
  out.diagonal = values.back();
  out.diagonal_exceeded = out.diagonal > 1.0 + tol;
  out.admissible = !out.negative_eigenspace && !out.diagonal_exceeded;
  return out;
}

std::vector<BetaCoeffs> vertex_betas(const LayerParams& layer) {
  return exact_vertices(layer).betas;
}

std::vector<std::vector<double>> vertex_tables(const LayerParams& layer) {
  return exact_vertices(layer).tables;
}

std::vector<double> p_from_d(std::span<const double> d_coeffs) {
  const std::size_t size = d_coeffs.size();
  std::vector<double> out(size, 0.0);
  for (std::size_t r = 0; r < size; ++r) {
    long double s = 0.0L;
    for (std::size_t l = 0; l <= r; ++l) {
      const long double term = static_cast<long double>(
                                   binomial(static_cast<long long>(r), static_cast<long long>(l))) *
                               d_coeffs[l];
      s += ((r - l) % 2 == 0) ? term : -term;
    }
    out[r] = static_cast<double>(s);
  }
  return out;
}

std::vector<double> d_from_p(std::span<const double> p_coeffs) {
  const std::size_t size = p_coeffs.size();
  std::vector<double> out(size, 0.0);
  for (std::size_t l = 0; l < size; ++l) {
    long double s = 0.0L;
    for (std::size_t r = 0; r <= l; ++r) {
      s += static_cast<long double>(binomial(static_cast<long long>(l), static_cast<long long>(r))) *
           p_coeffs[r];
    }
    out[l] = static_cast<double>(s);
  }
  return out;
}

double eigenspace_dimension(int n, int j) {
  return binomial(n, j) - binomial(n, j - 1);
}

}  // namespace jk
