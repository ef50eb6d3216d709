#include "core/mmd.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "core/parallel.hpp"
#include "core/special.hpp"

namespace rfts::mmd {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// full symmetric Gaussian kernel matrix of the pooled rows
Matrix kernel_matrix(const Matrix& pooled, double sigma) {
  const std::size_t n = pooled.rows();
  Matrix k(n, n);
  const double scale = -0.5 / (sigma * sigma);
  for (std::size_t i = 0; i < n; ++i) {
    k.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(scale * squared_distance(pooled.row(i), pooled.row(j)));
      k.at(i, j) = v;
      k.at(j, i) = v;
    }
  }
  return k;
}

// unbiased MMD^2 from a precomputed kernel matrix: the first nx indices of
// `order` form the X group, the rest the Y group
double mmd2_from_kernel(const Matrix& k, std::span<const std::size_t> order,
                        std::size_t nx) {
  const std::size_t total = order.size();
  const std::size_t ny = total - nx;
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = i + 1; j < nx; ++j) xx += k.at(order[i], order[j]);
  for (std::size_t i = nx; i < total; ++i)
    for (std::size_t j = i + 1; j < total; ++j) yy += k.at(order[i], order[j]);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = nx; j < total; ++j) xy += k.at(order[i], order[j]);
  const double dx = static_cast<double>(nx);
  const double dy = static_cast<double>(ny);
  return 2.0 * xx / (dx * (dx - 1.0)) + 2.0 * yy / (dy * (dy - 1.0)) -
         2.0 * xy / (dx * dy);
}

}  // namespace

double median_heuristic(const Matrix& pooled) {
  const std::size_t n = pooled.rows();
  if (n < 2) throw std::invalid_argument("median_heuristic: need at least 2 rows");
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dists.push_back(std::sqrt(squared_distance(pooled.row(i), pooled.row(j))));
  const double med = numkit::median(std::move(dists));
  if (!(med > 0.0))
    throw ComputeError("median_heuristic: median pairwise distance is zero "
                       "(all rows identical?)");
  return med;
}

double mmd2_unbiased(const Matrix& x, const Matrix& y, double sigma) {
  if (x.rows() < 2 || y.rows() < 2)
    throw std::invalid_argument("mmd2_unbiased: need at least 2 rows per sample");
  if (x.cols() != y.cols())
    throw std::invalid_argument("mmd2_unbiased: column counts differ");
  if (!(sigma > 0.0)) throw std::invalid_argument("mmd2_unbiased: sigma must be positive");
  const double scale = -0.5 / (sigma * sigma);
  auto pair_sum = [&](const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < b.rows(); ++j)
        s += std::exp(scale * squared_distance(a.row(i), b.row(j)));
    return s;
  };
  const double nx = static_cast<double>(x.rows());
  const double ny = static_cast<double>(y.rows());
  const double xx = pair_sum(x, x) - nx;  // drop the i == j diagonal of ones
  const double yy = pair_sum(y, y) - ny;
  const double xy = pair_sum(x, y);
  return xx / (nx * (nx - 1.0)) + yy / (ny * (ny - 1.0)) - 2.0 * xy / (nx * ny);
}

twosample::TestReport mmd_boot_test(const Matrix& x, const Matrix& y,
                                    const KernelConfig& config, int b_permutations,
                                    numkit::RngStream rng, int jobs) {
  if (b_permutations < 50)
    throw std::invalid_argument("mmd_boot_test: need at least 50 permutations");
  const auto start = std::chrono::steady_clock::now();
  const LabeledDataset pooled = pool_samples(x, y);
  if (x.rows() < 2 || y.rows() < 2)
    throw std::invalid_argument("mmd_boot_test: need at least 2 rows per sample");

  const double sigma = config.bandwidth_sigma > 0.0 ? config.bandwidth_sigma
                                                    : median_heuristic(pooled.features);
  const Matrix k = kernel_matrix(pooled.features, sigma);

  const std::size_t total = pooled.size();
  const std::size_t nx = x.rows();
  std::vector<std::size_t> identity(total);
  std::iota(identity.begin(), identity.end(), 0);
  const double observed = mmd2_from_kernel(k, identity, nx);

  std::vector<double> permuted(static_cast<std::size_t>(b_permutations));
  parallel_for(permuted.size(), jobs, [&](std::size_t b) {
    numkit::RngStream perm_rng = rng.split(b + 1);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    perm_rng.shuffle(order);
    permuted[b] = mmd2_from_kernel(k, order, nx);
  });

  std::size_t geq = 0;
  for (double v : permuted) geq += static_cast<std::size_t>(v >= observed);

  twosample::TestReport r;
  r.test_name = twosample::TestName::MMDBoot;
  r.statistic = observed;
  r.p_value = static_cast<double>(1 + geq) / static_cast<double>(b_permutations + 1);
  r.n_permutations_or_k = b_permutations;
  r.seed = rng.seed();
  r.details = {{"sigma", sigma}};
  r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

}  // namespace rfts::mmd
