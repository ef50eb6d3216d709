#include "core/linalg.hpp"

#include <cmath>
#include <string>

namespace rfts::numkit {

std::vector<double> LowerTriangular::apply(std::span<const double> x) const {
  std::vector<double> y(dim, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    double s = 0.0;
    const double* row = entries.data() + r * dim;
    for (std::size_t c = 0; c <= r; ++c) s += row[c] * x[c];
    y[r] = s;
  }
  return y;
}

LowerTriangular cholesky(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n)
    throw std::invalid_argument("cholesky: matrix must be square and nonempty");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c)
      if (std::fabs(a.at(r, c) - a.at(c, r)) > 1e-10 * (1.0 + std::fabs(a.at(r, c))))
        throw std::invalid_argument("cholesky: matrix is not symmetric at (" +
                                    std::to_string(r) + "," + std::to_string(c) + ")");

  LowerTriangular l;
  l.dim = n;
  l.entries.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a.at(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
    if (!(d > 0.0))
      throw ComputeError("cholesky: matrix not positive definite, pivot " +
                         std::to_string(j) + " = " + std::to_string(d));
    const double diag = std::sqrt(d);
    l.at(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      l.at(i, j) = s / diag;
    }
  }
  return l;
}

namespace {

// Largest eigenvalue (by magnitude shifted into positivity) of symmetric a,
// using deterministic power iteration.
double power_iterate(const Matrix& a, double shift) {
  const std::size_t n = a.rows();
  std::vector<double> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(double(n)) + 1e-3 * double(i + 1);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;

  double lambda = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    for (std::size_t r = 0; r < n; ++r) {
      double s = shift * v[r];
      for (std::size_t c = 0; c < n; ++c) s += a.at(r, c) * v[c];
      w[r] = s;
    }
    double wn = 0.0;
    for (double x : w) wn += x * x;
    wn = std::sqrt(wn);
    if (wn == 0.0) return -shift;  // v in the kernel of (a + shift I)
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += v[i] * w[i];
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (iter > 4 && std::fabs(dot - lambda) <= 1e-12 * (1.0 + std::fabs(dot))) {
      lambda = dot;
      break;
    }
    lambda = dot;
  }
  return lambda - shift;
}

}  // namespace

std::pair<double, double> extreme_eigenvalues(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n)
    throw std::invalid_argument("extreme_eigenvalues: matrix must be square");
  // Gershgorin bound keeps the shifted matrices positive semi-definite.
  double bound = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < n; ++c) s += std::fabs(a.at(r, c));
    bound = std::max(bound, s);
  }
  const double lmax = power_iterate(a, bound);
  // lambda_min via the largest eigenvalue of (lmax I - A).
  Matrix neg(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) neg.at(r, c) = -a.at(r, c);
  for (std::size_t i = 0; i < n; ++i) neg.at(i, i) += lmax;
  const double gap = power_iterate(neg, bound);
  return {lmax - gap, lmax};
}

}  // namespace rfts::numkit
