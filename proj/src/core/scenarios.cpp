#include "core/scenarios.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "core/linalg.hpp"
#include "core/special.hpp"

namespace rfts::scenarios {

namespace {

constexpr std::array<const char*, 7> kFamilyNames = {
    "mean_shift",       "contamination", "correlated_gaussian", "t_copula",
    "blob_correlation", "blob_variance", "level_check"};

constexpr std::array<const char*, 15> kLevelDistNames = {
    "rnorm", "rbinom", "rt",     "rpois",    "rf",       "runif",    "rmvt", "rexp",
    "rbeta", "mvrnorm", "rlnorm", "rtcopula", "rweibull", "rmixture", "cont_dist"};

std::size_t pair_count(int p) {
  return static_cast<std::size_t>(p) * static_cast<std::size_t>(p - 1) / 2;
}

}  // namespace

std::string family_name(Family f) { return kFamilyNames[static_cast<std::size_t>(f)]; }

Family family_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
    if (name == kFamilyNames[i]) return static_cast<Family>(i);
  throw std::invalid_argument("unknown scenario family: " + name);
}

std::string level_dist_name(LevelDist d) {
  return kLevelDistNames[static_cast<std::size_t>(d)];
}

LevelDist level_dist_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kLevelDistNames.size(); ++i)
    if (name == kLevelDistNames[i]) return static_cast<LevelDist>(i);
  throw std::invalid_argument("unknown level-check distribution: " + name);
}

const std::vector<LevelDist>& level_dist_catalog() {
  static const std::vector<LevelDist> catalog = [] {
    std::vector<LevelDist> v;
    for (std::size_t i = 0; i < kLevelDistNames.size(); ++i)
      v.push_back(static_cast<LevelDist>(i));
    return v;
  }();
  return catalog;
}

void ScenarioSpec::validate() const {
  if (p < 1) throw std::invalid_argument("ScenarioSpec: p must be >= 1");
  if (n_per_class < 1)
    throw std::invalid_argument("ScenarioSpec: n_per_class must be >= 1");
  switch (family) {
    case Family::MeanShift:
      if (!(knob >= 0.0)) throw std::invalid_argument("ScenarioSpec: delta must be >= 0");
      if (d < 1 || d > p)
        throw std::invalid_argument("ScenarioSpec: mean shift needs 1 <= d <= p");
      break;
    case Family::Contamination:
      if (!(knob >= 0.0 && knob <= 1.0))
        throw std::invalid_argument("ScenarioSpec: lambda must lie in [0,1]");
      if (d < 1 || d > p)
        throw std::invalid_argument("ScenarioSpec: contamination needs 1 <= d <= p");
      break;
    case Family::CorrelatedGaussian: {
      if (p < 2)
        throw std::invalid_argument("ScenarioSpec: correlated Gaussian needs p >= 2");
      if (d < 1 || static_cast<std::size_t>(d) > pair_count(p))
        throw std::invalid_argument(
            "ScenarioSpec: correlated Gaussian needs 1 <= d <= p(p-1)/2");
      if (!(knob > -1.0 && knob < 1.0))
        throw std::invalid_argument("ScenarioSpec: rho must lie in (-1,1)");
      break;
    }
    case Family::TCopula:
      if (!(knob > 0.0)) throw std::invalid_argument("ScenarioSpec: nu must be > 0");
      if (d < 1 || d > p)
        throw std::invalid_argument("ScenarioSpec: t-copula needs 1 <= d <= p");
      break;
    case Family::BlobCorrelation: {
      if (d < 1 || d > 3)
        throw std::invalid_argument(
            "ScenarioSpec: blob base length d must lie in [1,3]");
      double t = 1.0;
      for (int j = 0; j < p; ++j) t *= d;
      if (t > 1e4)
        throw ComputeError("ScenarioSpec: blob mixture size d^p = " + std::to_string(t) +
                           " exceeds the 1e4 cap");
      break;
    }
    case Family::BlobVariance:
      if (!(knob > 0.0))
        throw std::invalid_argument("ScenarioSpec: middle-component sd must be > 0");
      break;
    case Family::LevelCheck:
      break;
  }
}

bool ScenarioSpec::is_null_case() const {
  switch (family) {
    case Family::MeanShift: return knob == 0.0;
    case Family::Contamination: return knob == 0.0;
    case Family::CorrelatedGaussian: return knob == 0.0;
    case Family::TCopula: return std::isinf(knob);
    case Family::BlobCorrelation: return knob == 0.0;
    case Family::BlobVariance: return knob == 1.0;
    case Family::LevelCheck: return true;
  }
  return false;
}

nlohmann::json ScenarioSpec::to_json() const {
  nlohmann::json j{{"family", family_name(family)},
                   {"p", p},
                   {"d", d},
                   {"knob", knob},
                   {"n_per_class", n_per_class}};
  if (family == Family::LevelCheck) j["level_dist"] = level_dist_name(level_dist);
  if (family == Family::BlobCorrelation) j["sigma_seed"] = sigma_seed;
  return j;
}

ScenarioSpec ScenarioSpec::from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  s.family = family_from_name(j.at("family").get<std::string>());
  s.p = j.at("p").get<int>();
  s.d = j.value("d", 1);
  s.knob = j.value("knob", 0.0);
  s.n_per_class = j.at("n_per_class").get<int>();
  if (j.contains("level_dist"))
    s.level_dist = level_dist_from_name(j.at("level_dist").get<std::string>());
  s.sigma_seed = j.value("sigma_seed", std::uint64_t{0});
  s.validate();
  return s;
}

namespace {

void check_pair(const SamplePair& pair) {
  if (!pair.x.all_finite() || !pair.y.all_finite())
    throw ComputeError("scenario sampler produced non-finite values");
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, numkit::RngStream& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.gaussian();
  return m;
}

int binomial_100_half(numkit::RngStream& rng) {
  int c = 0;
  for (int i = 0; i < 100; ++i) c += rng.uniform() < 0.5;
  return c;
}

// one row of the contaminated component P_c
void fill_contaminated_row(std::span<double> row, int d, numkit::RngStream& rng) {
  for (int j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = binomial_100_half(rng);
  for (std::size_t j = static_cast<std::size_t>(d); j < row.size(); ++j)
    row[j] = 50.0 + 5.0 * rng.gaussian();
}

void fill_gaussian_row(std::span<double> row, double mean, double sd,
                       numkit::RngStream& rng) {
  for (double& v : row) v = mean + sd * rng.gaussian();
}

Matrix equicorrelation(int p, double rho) {
  Matrix sigma(static_cast<std::size_t>(p), static_cast<std::size_t>(p), rho);
  for (int i = 0; i < p; ++i) sigma.at(i, i) = 1.0;
  return sigma;
}

// u safe for normal_quantile even when the t cdf saturates in double
double safe_normal_quantile(double u) {
  constexpr double lo = 1e-300;
  constexpr double hi = 1.0 - 1.1e-16;
  return numkit::normal_quantile(std::min(std::max(u, lo), hi));
}

}  // namespace

SamplePair sample_mean_shift(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::MeanShift)
    throw std::invalid_argument("sample_mean_shift: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  SamplePair pair{gaussian_matrix(n, p, rng), gaussian_matrix(n, p, rng)};
  const double shift = spec.knob / std::sqrt(static_cast<double>(spec.d));
  if (shift != 0.0)
    for (std::size_t r = 0; r < n; ++r) {
      auto row = pair.y.row(r);
      for (int j = 0; j < spec.d; ++j) row[static_cast<std::size_t>(j)] += shift;
    }
  check_pair(pair);
  return pair;
}

SamplePair sample_contamination(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::Contamination)
    throw std::invalid_argument("sample_contamination: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  SamplePair pair{Matrix(n, p), Matrix(n, p)};
  for (std::size_t r = 0; r < n; ++r) fill_gaussian_row(pair.x.row(r), 50.0, 5.0, rng);
  for (std::size_t r = 0; r < n; ++r) {
    if (rng.uniform() < spec.knob)
      fill_contaminated_row(pair.y.row(r), spec.d, rng);
    else
      fill_gaussian_row(pair.y.row(r), 50.0, 5.0, rng);
  }
  check_pair(pair);
  return pair;
}

SamplePair sample_correlated_gaussian(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::CorrelatedGaussian)
    throw std::invalid_argument("sample_correlated_gaussian: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  SamplePair pair{gaussian_matrix(n, p, rng), Matrix(n, p)};

  if (spec.knob == 0.0) {
    pair.y = gaussian_matrix(n, p, rng);
    check_pair(pair);
    return pair;
  }

  const bool case_all_pairs = static_cast<std::size_t>(spec.d) == pair_count(spec.p);
  Matrix sigma(p, p, 0.0);
  if (case_all_pairs) {
    // equicorrelation is positive definite iff rho > -1/(p-1)
    if (!(spec.knob > -1.0 / static_cast<double>(spec.p - 1)))
      throw ComputeError("correlated Gaussian: equicorrelation rho <= -1/(p-1)");
    sigma = equicorrelation(spec.p, spec.knob);
  } else {
    for (std::size_t i = 0; i < p; ++i) sigma.at(i, i) = 1.0;
    int left = spec.d;
    for (std::size_t i = 0; i < p && left > 0; ++i)
      for (std::size_t j = i + 1; j < p && left > 0; ++j) {
        sigma.at(i, j) = sigma.at(j, i) = spec.knob;
        --left;
      }
  }
  numkit::LowerTriangular chol;
  try {
    chol = numkit::cholesky(sigma);
  } catch (const ComputeError& e) {
    throw ComputeError(std::string("correlated Gaussian: covariance not positive "
                                   "definite (") +
                       e.what() + ")");
  }
  std::vector<double> z(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& v : z) v = rng.gaussian();
    const auto y = chol.apply(z);
    auto row = pair.y.row(r);
    std::copy(y.begin(), y.end(), row.begin());
  }
  check_pair(pair);
  return pair;
}

SamplePair sample_t_copula(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::TCopula)
    throw std::invalid_argument("sample_t_copula: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  const double nu = spec.knob;
  SamplePair pair{gaussian_matrix(n, p, rng), Matrix(n, p)};
  for (std::size_t r = 0; r < n; ++r) {
    auto row = pair.y.row(r);
    if (std::isinf(nu)) {
      // degenerate limit: G == 1 and t_nu == Phi, so the copula vanishes
      for (int j = 0; j < spec.d; ++j) row[static_cast<std::size_t>(j)] = rng.gaussian();
    } else {
      const double g = numkit::gamma_sample(0.5 * nu, 0.5 * nu, rng);
      const double scale = 1.0 / std::sqrt(g);
      for (int j = 0; j < spec.d; ++j) {
        const double t = rng.gaussian() * scale;
        row[static_cast<std::size_t>(j)] =
            safe_normal_quantile(numkit::student_t_cdf(t, nu));
      }
    }
    for (std::size_t j = static_cast<std::size_t>(spec.d); j < p; ++j)
      row[j] = rng.gaussian();
  }
  check_pair(pair);
  return pair;
}

SamplePair sample_blob_correlation(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::BlobCorrelation)
    throw std::invalid_argument("sample_blob_correlation: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  static constexpr double kBase[3] = {1.0, 2.0, 3.0};
  // component sd relative to the unit center spacing; blobs are well
  // separated (spacing/sd = 5, the same geometry as the variance variant
  // with centers (-5, 0, 5) and sd 1), so only the within-blob shape
  // distinguishes the two samples
  static constexpr double kComponentSd = 0.2;

  std::size_t blob_count = 1;
  for (int j = 0; j < spec.p; ++j) blob_count *= static_cast<std::size_t>(spec.d);

  // shared correlation for the alternative, regenerated deterministically
  // from sigma_seed so every run of a study uses the same draw
  numkit::LowerTriangular chol;
  if (spec.knob != 0.0) {
    numkit::RngStream sigma_rng(spec.sigma_seed, 0x5161);
    const double bound = 1.0 - 1.0 / std::sqrt(static_cast<double>(spec.p));
    chol = numkit::cholesky(random_correlation(spec.p, bound, sigma_rng));
  }

  auto center_coord = [&](std::size_t t, std::size_t j) {
    std::size_t digit = t;
    for (std::size_t k = 0; k < j; ++k) digit /= static_cast<std::size_t>(spec.d);
    return kBase[digit % static_cast<std::size_t>(spec.d)];
  };

  SamplePair pair{Matrix(n, p), Matrix(n, p)};
  std::vector<double> z(p);
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = rng.below(blob_count);
    auto row = pair.x.row(r);
    for (std::size_t j = 0; j < p; ++j)
      row[j] = center_coord(t, j) + kComponentSd * rng.gaussian();
  }
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = rng.below(blob_count);
    auto row = pair.y.row(r);
    if (spec.knob == 0.0) {
      for (std::size_t j = 0; j < p; ++j)
        row[j] = center_coord(t, j) + kComponentSd * rng.gaussian();
    } else {
      for (double& v : z) v = rng.gaussian();
      const auto corr = chol.apply(z);
      for (std::size_t j = 0; j < p; ++j)
        row[j] = center_coord(t, j) + kComponentSd * corr[j];
    }
  }
  check_pair(pair);
  return pair;
}

SamplePair sample_blob_variance(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::BlobVariance)
    throw std::invalid_argument("sample_blob_variance: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);
  static constexpr double kMeans[3] = {-5.0, 0.0, 5.0};
  SamplePair pair{Matrix(n, p), Matrix(n, p)};
  for (double& v : pair.x.data()) {
    const auto comp = static_cast<std::size_t>(rng.below(3));
    v = kMeans[comp] + rng.gaussian();
  }
  for (double& v : pair.y.data()) {
    const auto comp = static_cast<std::size_t>(rng.below(3));
    const double sd = comp == 1 ? spec.knob : 1.0;
    v = kMeans[comp] + sd * rng.gaussian();
  }
  check_pair(pair);
  return pair;
}

namespace {

void fill_level_row(std::span<double> row, LevelDist dist, int cont_d,
                    const numkit::LowerTriangular* chol, std::vector<double>& scratch,
                    numkit::RngStream& rng) {
  switch (dist) {
    case LevelDist::RNorm:
      for (double& v : row) v = rng.gaussian();
      break;
    case LevelDist::RBinom:
      for (double& v : row) {
        int c = 0;
        for (int t = 0; t < 4; ++t) c += rng.uniform() < 0.7;
        v = c;
      }
      break;
    case LevelDist::RT:
      for (double& v : row)
        v = rng.gaussian() / std::sqrt(numkit::gamma_sample(0.5, 0.5, rng));
      break;
    case LevelDist::RPois:
      for (double& v : row) {
        // Knuth's product-of-uniforms method, mean 4
        const double limit = std::exp(-4.0);
        int k = 0;
        double prod = rng.uniform_open();
        while (prod > limit) {
          ++k;
          prod *= rng.uniform_open();
        }
        v = k;
      }
      break;
    case LevelDist::RF:
      for (double& v : row)
        v = numkit::gamma_sample(2.0, 2.0, rng) / numkit::gamma_sample(6.0, 6.0, rng);
      break;
    case LevelDist::RUnif:
      for (double& v : row) v = rng.uniform(3.0, 10.0);
      break;
    case LevelDist::RMvt: {
      const double scale = 1.0 / std::sqrt(numkit::gamma_sample(0.5, 0.5, rng));
      for (double& v : row) v = rng.gaussian() * scale;
      break;
    }
    case LevelDist::RExp:
      for (double& v : row) v = -std::log(rng.uniform_open()) / 4.0;
      break;
    case LevelDist::RBeta:
      for (double& v : row) {
        const double g1 = numkit::gamma_sample(3.0, 1.0, rng);
        const double g2 = numkit::gamma_sample(4.0, 1.0, rng);
        v = g1 / (g1 + g2);
      }
      break;
    case LevelDist::MvrNorm: {
      for (double& v : scratch) v = rng.gaussian();
      const auto y = chol->apply(scratch);
      std::copy(y.begin(), y.end(), row.begin());
      break;
    }
    case LevelDist::RLnorm:
      for (double& v : row) v = std::exp(rng.gaussian());
      break;
    case LevelDist::RTCopula: {
      const double scale = 1.0 / std::sqrt(numkit::gamma_sample(0.5, 0.5, rng));
      for (double& v : row)
        v = safe_normal_quantile(numkit::student_t_cdf(rng.gaussian() * scale, 1.0));
      break;
    }
    case LevelDist::RWeibull:
      for (double& v : row) v = -std::log(rng.uniform_open());
      break;
    case LevelDist::RMixture: {
      const double shift = rng.uniform() < 0.9 ? 0.0 : 4.0;
      for (double& v : row) v = shift + rng.gaussian();
      break;
    }
    case LevelDist::ContDist:
      if (rng.uniform() < 0.6)
        fill_contaminated_row(row, cont_d, rng);
      else
        fill_gaussian_row(row, 50.0, 5.0, rng);
      break;
  }
}

}  // namespace

SamplePair sample_level_check(const ScenarioSpec& spec, numkit::RngStream& rng) {
  spec.validate();
  if (spec.family != Family::LevelCheck)
    throw std::invalid_argument("sample_level_check: wrong family");
  const auto n = static_cast<std::size_t>(spec.n_per_class);
  const auto p = static_cast<std::size_t>(spec.p);

  numkit::LowerTriangular chol;
  if (spec.level_dist == LevelDist::MvrNorm)
    chol = numkit::cholesky(equicorrelation(spec.p, 0.95));
  const int cont_d = std::max(1, static_cast<int>(std::lround(0.2 * spec.p)));
  std::vector<double> scratch(p);

  SamplePair pair{Matrix(n, p), Matrix(n, p)};
  for (std::size_t r = 0; r < n; ++r)
    fill_level_row(pair.x.row(r), spec.level_dist, cont_d, &chol, scratch, rng);
  for (std::size_t r = 0; r < n; ++r)
    fill_level_row(pair.y.row(r), spec.level_dist, cont_d, &chol, scratch, rng);
  check_pair(pair);
  return pair;
}

SamplePair sample(const ScenarioSpec& spec, numkit::RngStream& rng) {
  switch (spec.family) {
    case Family::MeanShift: return sample_mean_shift(spec, rng);
    case Family::Contamination: return sample_contamination(spec, rng);
    case Family::CorrelatedGaussian: return sample_correlated_gaussian(spec, rng);
    case Family::TCopula: return sample_t_copula(spec, rng);
    case Family::BlobCorrelation: return sample_blob_correlation(spec, rng);
    case Family::BlobVariance: return sample_blob_variance(spec, rng);
    case Family::LevelCheck: return sample_level_check(spec, rng);
  }
  throw std::invalid_argument("sample: unknown family");
}

Matrix random_correlation(int p, double ratio_bound, numkit::RngStream& rng) {
  if (p < 2) throw std::invalid_argument("random_correlation: p must be >= 2");
  if (!(ratio_bound > 0.0 && ratio_bound < 1.0))
    throw std::invalid_argument("random_correlation: ratio_bound must lie in (0,1)");
  constexpr int kMaxTries = 200;
  const auto dim = static_cast<std::size_t>(p);
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    Matrix a = gaussian_matrix(dim, dim, rng);
    Matrix s(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < dim; ++k) dot += a.at(i, k) * a.at(j, k);
        s.at(i, j) = s.at(j, i) = dot;
      }
    bool ok = true;
    std::vector<double> scale(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!(s.at(i, i) > 0.0)) {
        ok = false;
        break;
      }
      scale[i] = 1.0 / std::sqrt(s.at(i, i));
    }
    if (!ok) continue;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) s.at(i, j) *= scale[i] * scale[j];
    for (std::size_t i = 0; i < dim; ++i) s.at(i, i) = 1.0;

    // Scale the off-diagonal structure so the eigenvalue ratio sits exactly
    // on the bound: Sigma(c) = I + c (S - I) keeps the unit diagonal, and
    // its ratio decreases continuously from 1 (c = 0) through the bound.
    // Pinning the ratio (rather than accepting anything at most the bound)
    // keeps the anisotropy strength, and with it the difficulty of the blob
    // alternative, reproducible across draws; the random draw still sets
    // the eigenvector structure and correlation signs.
    auto ratio_at = [&](double c) {
      Matrix m(dim, dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
          m.at(i, j) = (i == j) ? 1.0 : c * s.at(i, j);
      const auto [lmin, lmax] = numkit::extreme_eigenvalues(m);
      return lmin / lmax;
    };
    if (!(ratio_at(1.0) < 1.0 - 1e-9)) continue;  // degenerate draw, S == I

    double lo = 0.0, hi = 1.0;
    while (ratio_at(hi) > ratio_bound && hi < 1e6) hi *= 2.0;
    if (hi >= 1e6) continue;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      (ratio_at(mid) > ratio_bound ? lo : hi) = mid;
      if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
    }
    const double c = hi;  // the side with ratio <= bound
    Matrix out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        out.at(i, j) = (i == j) ? 1.0 : c * s.at(i, j);
    const auto [lmin, lmax] = numkit::extreme_eigenvalues(out);
    if (lmin > 0.0 && lmin / lmax <= ratio_bound + 1e-9) return out;
  }
  throw ComputeError("random_correlation: eigenvalue-ratio condition not met after " +
                     std::to_string(kMaxTries) + " tries");
}

}  // namespace rfts::scenarios
