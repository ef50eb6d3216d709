// Quadratic-time MMD baseline: Gaussian kernel, median-heuristic
// bandwidth, unbiased U-statistic estimator, permutation calibration.
#pragma once

#include "core/common.hpp"
#include "core/rng.hpp"
#include "core/twosample.hpp"

namespace rfts::mmd {

struct KernelConfig {
  // bandwidth sigma; <= 0 means "resolve by the median heuristic"
  double bandwidth_sigma = 0.0;
};

// Median over all unordered pairwise Euclidean distances of the pooled
// rows (duplicate-row zeros included); throws if that median is zero.
double median_heuristic(const Matrix& pooled);

// Unbiased quadratic-time estimator of MMD^2 with kernel
// k(a,b) = exp(-||a-b||^2 / (2 sigma^2)).
double mmd2_unbiased(const Matrix& x, const Matrix& y, double sigma);

// Permutation test on the pooled labels; the kernel matrix is computed
// once and re-indexed per permutation.
twosample::TestReport mmd_boot_test(const Matrix& x, const Matrix& y,
                                    const KernelConfig& config, int b_permutations,
                                    numkit::RngStream rng, int jobs = 1);

}  // namespace rfts::mmd
