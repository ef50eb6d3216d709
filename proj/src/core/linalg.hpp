// Small dense linear algebra: Cholesky factorization and extreme
// eigenvalues of symmetric matrices. Enough to sample N(0, Sigma) and to
// enforce eigenvalue-ratio conditions; not a general-purpose library.
#pragma once

#include <utility>
#include <vector>

#include "core/common.hpp"

namespace rfts::numkit {

// Lower-triangular factor L with L * L^T = A.
struct LowerTriangular {
  std::size_t dim = 0;
  std::vector<double> entries;  // row-major, zero above the diagonal

  double at(std::size_t r, std::size_t c) const { return entries[r * dim + c]; }
  double& at(std::size_t r, std::size_t c) { return entries[r * dim + c]; }

  // y = L * x
  std::vector<double> apply(std::span<const double> x) const;
};

// Cholesky factorization of a symmetric positive-definite matrix; throws
// ComputeError naming the failing pivot otherwise.
LowerTriangular cholesky(const Matrix& a);

// (lambda_min, lambda_max) of a symmetric matrix via power iteration on A
// and on (lambda_max * I - A).
std::pair<double, double> extreme_eigenvalues(const Matrix& a);

}  // namespace rfts::numkit
