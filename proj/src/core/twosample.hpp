// The two-sample tests: split-sample Binomial and Hoeffding tests, the
// permutation-calibrated OOB test, the partition-resampling U-statistic
// test, the TV-distance estimate and the closed-form power predictors.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>

#include <json.hpp>

#include "core/classifiers.hpp"
#include "core/common.hpp"
#include "core/forest.hpp"
#include "core/rng.hpp"

namespace rfts::twosample {

enum class TestName { Binomial, Hoeffding, HypoRF, UStat, MMDBoot };

std::string test_name_string(TestName t);
TestName test_name_from_string(const std::string& s);

struct TestReport {
  TestName test_name = TestName::Binomial;
  double statistic = 0.0;
  std::optional<double> p_value;                      // absent for Hoeffding
  std::optional<std::map<std::string, bool>> reject_at;  // threshold-form tests
  std::optional<double> null_mean;
  std::optional<double> null_sd;
  std::optional<int> n_permutations_or_k;
  std::uint64_t seed = 0;
  std::int64_t runtime_ms = 0;
  nlohmann::json details;  // per-test diagnostics, documented in the README

  nlohmann::json to_json() const;
};

struct SplitPlan {
  std::size_t n_train = 0;
  std::size_t m_n = 0;
  std::optional<std::uint64_t> shuffle_seed;  // default: derived from the test stream

  // n_train = floor(total/2), the m_n = n convention of the experiments
  static SplitPlan half_split(std::size_t total_rows);
  void validate(std::size_t total_rows) const;
};

// Algorithm: label the pooled rows (X -> 1, Y -> 0), shuffle, split per
// plan, train the classifier on the training part and score the holdout;
// p-value is the exact Binomial(m_n, 1/2) lower tail of the error count.
TestReport binomial_test(const Matrix& x, const Matrix& y,
                         const classifiers::ClassifierSpec& spec, const SplitPlan& plan,
                         numkit::RngStream rng, int jobs = 1);

// Same split pipeline; rejects when the holdout error margin drops below
// the Hoeffding threshold t* = -sqrt(-2 log(alpha) / m_n).
TestReport hoeffding_test(const Matrix& x, const Matrix& y,
                          const classifiers::ClassifierSpec& spec, const SplitPlan& plan,
                          double alpha, numkit::RngStream rng, int jobs = 1);

// OOB error of a forest on the full pooled data, calibrated by K uniform
// label permutations with a normal approximation to the permutation null.
TestReport hyporf_test(const Matrix& x, const Matrix& y,
                       const forest::ForestConfig& config, int k_permutations,
                       numkit::RngStream rng, int jobs = 1);

// Partition-resampling U-statistic test: K replicates of m disjoint
// size-n_train subsets, OOB error per subset, within/between-partition
// variance decomposition, reject when (U - 1/2)/sqrt(V) < Phi^{-1}(alpha).
TestReport ustat_test(const Matrix& x, const Matrix& y,
                      const forest::ForestConfig& config, int k_replicates,
                      std::size_t n_train, int m_partitions, double alpha,
                      numkit::RngStream rng, int jobs = 1);

// 1 - 2 * holdout_error; consistent for the total variation distance, may
// be negative in finite samples and is intentionally not clamped.
double tv_estimate(double holdout_error);

// Asymptotic power of the split-sample test at level alpha.
double asymptotic_power(double alpha, std::size_t m_n, double l_star, double a, double c);

// Asymptotic power of the U-statistic test; variance_proxy stands in for
// the (caller-supplied) variance combination in the denominator.
double ustat_power(double alpha, int k, double l_star, double a, double variance_proxy);

namespace detail {

// split pipeline with an arbitrary classify function; lets tests exercise
// the exact Binomial null with a stub classifier
struct SplitOutcome {
  std::size_t errors = 0;
  std::size_t m_n = 0;
};
using TrainFn =
    std::function<std::function<int(std::span<const double>)>(const LabeledDataset&)>;
SplitOutcome run_split(const LabeledDataset& pooled, const SplitPlan& plan,
                       const TrainFn& trainer, numkit::RngStream& rng);

// observed OOB error plus the K permuted OOB errors (order = permutation index)
struct PermutationRun {
  double observed = 0.0;
  std::vector<double> permuted;
};
PermutationRun hyporf_run(const LabeledDataset& pooled, const forest::ForestConfig& config,
                          int k_permutations, numkit::RngStream rng, int jobs);

// variance decomposition from the K x m matrix of subset OOB errors
struct UstatDecomposition {
  double u_hat = 0.0;
  double sigma2_wp = 0.0;
  double sigma2_bp = 0.0;
  double v_hat = 0.0;
  double v_used = 0.0;
  bool fallback = false;
};
UstatDecomposition ustat_decompose(const std::vector<std::vector<double>>& h);

}  // namespace detail

}  // namespace rfts::twosample
