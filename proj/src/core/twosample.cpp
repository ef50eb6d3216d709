#include "core/twosample.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "core/format.hpp"
#include "core/parallel.hpp"
#include "core/special.hpp"

namespace rfts::twosample {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start)
      .count();
}

constexpr double kAlphaGrid[] = {0.01, 0.05, 0.10};

}  // namespace

std::string test_name_string(TestName t) {
  switch (t) {
    case TestName::Binomial: return "binomial";
    case TestName::Hoeffding: return "hoeffding";
    case TestName::HypoRF: return "hyporf";
    case TestName::UStat: return "ustat";
    case TestName::MMDBoot: return "mmdboot";
  }
  return "?";
}

TestName test_name_from_string(const std::string& s) {
  if (s == "binomial") return TestName::Binomial;
  if (s == "hoeffding") return TestName::Hoeffding;
  if (s == "hyporf") return TestName::HypoRF;
  if (s == "ustat") return TestName::UStat;
  if (s == "mmdboot") return TestName::MMDBoot;
  throw std::invalid_argument("unknown test name: " + s);
}

nlohmann::json TestReport::to_json() const {
  nlohmann::json j{{"test", test_name_string(test_name)},
                   {"statistic", statistic},
                   {"seed", seed},
                   {"runtime_ms", runtime_ms}};
  if (p_value) j["p_value"] = *p_value;
  if (reject_at) j["reject_at"] = *reject_at;
  if (null_mean) j["null_mean"] = *null_mean;
  if (null_sd) j["null_sd"] = *null_sd;
  if (n_permutations_or_k) j["k"] = *n_permutations_or_k;
  if (!details.is_null()) j["details"] = details;
  return j;
}

SplitPlan SplitPlan::half_split(std::size_t total_rows) {
  SplitPlan p;
  p.n_train = total_rows / 2;
  p.m_n = total_rows - p.n_train;
  return p;
}

void SplitPlan::validate(std::size_t total_rows) const {
  if (n_train < 1 || m_n < 1)
    throw std::invalid_argument("SplitPlan: n_train and m_n must both be >= 1");
  if (n_train + m_n != total_rows)
    throw std::invalid_argument("SplitPlan: n_train + m_n = " +
                                std::to_string(n_train + m_n) + " but data has " +
                                std::to_string(total_rows) + " rows");
}

namespace detail {

SplitOutcome run_split(const LabeledDataset& pooled, const SplitPlan& plan,
                       const TrainFn& trainer, numkit::RngStream& rng) {
  plan.validate(pooled.size());
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  numkit::RngStream shuffle_rng =
      plan.shuffle_seed ? numkit::RngStream(*plan.shuffle_seed) : rng.split(0x51u);
  shuffle_rng.shuffle(order);

  const auto train_idx = std::span<const std::size_t>(order.data(), plan.n_train);
  const auto test_idx =
      std::span<const std::size_t>(order.data() + plan.n_train, plan.m_n);
  const LabeledDataset train_set = subset_rows(pooled, train_idx);
  auto classify = trainer(train_set);

  SplitOutcome out;
  out.m_n = plan.m_n;
  for (std::size_t i : test_idx)
    out.errors +=
        static_cast<std::size_t>(classify(pooled.features.row(i)) != pooled.labels[i]);
  return out;
}

PermutationRun hyporf_run(const LabeledDataset& pooled, const forest::ForestConfig& config,
                          int k_permutations, numkit::RngStream rng, int jobs) {
  if (k_permutations < 2)
    throw std::invalid_argument("hyporf: K must be >= 2 so the variance is estimable");
  PermutationRun run;
  run.permuted.assign(static_cast<std::size_t>(k_permutations), 0.0);
  // task 0 = observed labels, tasks 1..K = uniform label permutations
  parallel_for(static_cast<std::size_t>(k_permutations) + 1, jobs, [&](std::size_t j) {
    numkit::RngStream task_rng = rng.split(j);
    LabeledDataset data = pooled;
    if (j > 0) task_rng.shuffle(data.labels);
    const auto forest = forest::fit(data, config, task_rng.split(1), 1);
    const double err = forest::oob_error(forest, data).error;
    if (j == 0)
      run.observed = err;
    else
      run.permuted[j - 1] = err;
  });
  return run;
}

UstatDecomposition ustat_decompose(const std::vector<std::vector<double>>& h) {
  const std::size_t k = h.size();
  if (k < 2) throw std::invalid_argument("ustat: need K >= 2 replicates");
  const std::size_t m = h.front().size();
  if (m < 2) throw std::invalid_argument("ustat: need m >= 2 partitions");

  UstatDecomposition d;
  std::vector<double> bar(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (double v : h[i]) bar[i] += v;
    bar[i] /= static_cast<double>(m);
    d.u_hat += bar[i];
  }
  d.u_hat /= static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (double v : h[i]) {
      const double diff = v - bar[i];
      d.sigma2_wp += diff * diff;
    }
    const double diff = bar[i] - d.u_hat;
    d.sigma2_bp += diff * diff;
  }
  d.sigma2_wp /= static_cast<double>(k * m * (m - 1));
  d.sigma2_bp /= static_cast<double>(k);
  d.v_hat = d.sigma2_wp - d.sigma2_bp;
  d.fallback = !(d.v_hat > 0.0);
  d.v_used = d.fallback ? d.sigma2_wp : d.v_hat;
  return d;
}

}  // namespace detail

namespace {

detail::TrainFn classifier_trainer(const classifiers::ClassifierSpec& spec,
                                   numkit::RngStream train_rng, int jobs) {
  return [spec, train_rng, jobs](const LabeledDataset& train_set) {
    auto clf = std::make_shared<classifiers::TrainedClassifier>(
        classifiers::train(spec, train_set, train_rng, jobs));
    return [clf](std::span<const double> z) { return clf->classify(z); };
  };
}

}  // namespace

TestReport binomial_test(const Matrix& x, const Matrix& y,
                         const classifiers::ClassifierSpec& spec, const SplitPlan& plan,
                         numkit::RngStream rng, int jobs) {
  const auto start = Clock::now();
  const LabeledDataset pooled = pool_samples(x, y);
  auto out = detail::run_split(pooled, plan, classifier_trainer(spec, rng.split(2), jobs),
                               rng);
  TestReport r;
  r.test_name = TestName::Binomial;
  r.statistic = static_cast<double>(out.errors);
  r.p_value = numkit::binomial_cdf(static_cast<std::int64_t>(out.errors),
                                   static_cast<std::int64_t>(out.m_n), 0.5);
  r.null_mean = 0.5 * static_cast<double>(out.m_n);
  r.null_sd = 0.5 * std::sqrt(static_cast<double>(out.m_n));
  r.seed = rng.seed();
  r.details = {{"m_n", out.m_n},
               {"n_train", plan.n_train},
               {"holdout_error", static_cast<double>(out.errors) /
                                     static_cast<double>(out.m_n)}};
  r.runtime_ms = elapsed_ms(start);
  return r;
}

TestReport hoeffding_test(const Matrix& x, const Matrix& y,
                          const classifiers::ClassifierSpec& spec, const SplitPlan& plan,
                          double alpha, numkit::RngStream rng, int jobs) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("hoeffding_test: alpha must lie in (0,1)");
  const auto start = Clock::now();
  const LabeledDataset pooled = pool_samples(x, y);
  auto out = detail::run_split(pooled, plan, classifier_trainer(spec, rng.split(2), jobs),
                               rng);
  const double margin =
      static_cast<double>(out.errors) / static_cast<double>(out.m_n) - 0.5;
  auto t_star = [&](double a) {
    return -std::sqrt(-2.0 * std::log(a) / static_cast<double>(out.m_n));
  };

  TestReport r;
  r.test_name = TestName::Hoeffding;
  r.statistic = margin;
  r.seed = rng.seed();
  std::map<std::string, bool> reject;
  nlohmann::json thresholds;
  auto add_alpha = [&](double a) {
    const std::string key = format_double(a);
    reject[key] = margin < t_star(a);
    thresholds[key] = t_star(a);
  };
  for (double a : kAlphaGrid) add_alpha(a);
  add_alpha(alpha);
  r.reject_at = std::move(reject);
  r.details = {{"alpha", alpha},
               {"t_star", t_star(alpha)},
               {"thresholds", thresholds},
               {"m_n", out.m_n},
               {"holdout_error",
                static_cast<double>(out.errors) / static_cast<double>(out.m_n)}};
  r.runtime_ms = elapsed_ms(start);
  return r;
}

TestReport hyporf_test(const Matrix& x, const Matrix& y,
                       const forest::ForestConfig& config, int k_permutations,
                       numkit::RngStream rng, int jobs) {
  const auto start = Clock::now();
  const LabeledDataset pooled = pool_samples(x, y);
  const auto run = detail::hyporf_run(pooled, config, k_permutations, rng, jobs);

  const auto k = static_cast<double>(k_permutations);
  double mu = 0.0;
  for (double v : run.permuted) mu += v;
  mu /= k;
  double var = 0.0;
  for (double v : run.permuted) var += (v - mu) * (v - mu);
  var /= (k - 1.0);
  if (!(var > 0.0))
    throw ComputeError("hyporf: permutation null is degenerate (all " +
                       std::to_string(k_permutations) + " permuted OOB errors equal " +
                       format_double(run.permuted.front()) + ", observed " +
                       format_double(run.observed) + ")");
  const double sd = std::sqrt(var);

  std::size_t at_or_below = 0;
  for (double v : run.permuted) at_or_below += static_cast<std::size_t>(v <= run.observed);

  TestReport r;
  r.test_name = TestName::HypoRF;
  r.statistic = run.observed;
  r.p_value = numkit::normal_cdf((run.observed - mu) / sd);
  r.null_mean = mu;
  r.null_sd = sd;
  r.n_permutations_or_k = k_permutations;
  r.seed = rng.seed();
  r.details = {{"perm_p_value", static_cast<double>(1 + at_or_below) / (k + 1.0)}};
  r.runtime_ms = elapsed_ms(start);
  return r;
}

TestReport ustat_test(const Matrix& x, const Matrix& y,
                      const forest::ForestConfig& config, int k_replicates,
                      std::size_t n_train, int m_partitions, double alpha,
                      numkit::RngStream rng, int jobs) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ustat_test: alpha must lie in (0,1)");
  if (k_replicates < 2) throw std::invalid_argument("ustat_test: K must be >= 2");
  if (m_partitions < 2)
    throw std::invalid_argument("ustat_test: need m >= 2 disjoint partitions");
  const auto start = Clock::now();
  const LabeledDataset pooled = pool_samples(x, y);
  const std::size_t total = pooled.size();
  if (n_train < 1 || n_train > total / 2)
    throw std::invalid_argument("ustat_test: n_train must lie in [1, n] (n = " +
                                std::to_string(total / 2) + ")");
  if (static_cast<std::size_t>(m_partitions) * n_train > total)
    throw std::invalid_argument("ustat_test: m * n_train exceeds the pooled size");

  std::vector<std::vector<double>> h(static_cast<std::size_t>(k_replicates));
  parallel_for(h.size(), jobs, [&](std::size_t k) {
    numkit::RngStream rep_rng = rng.split(k);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    auto& row = h[k];
    row.assign(static_cast<std::size_t>(m_partitions), 0.0);
    for (int j = 0; j < m_partitions; ++j) {
      const std::size_t lo = static_cast<std::size_t>(j) * n_train;
      // redraw this subset (reshuffling the not-yet-committed tail) until it
      // contains both classes; disjointness with earlier subsets is kept
      constexpr int kMaxRedraws = 64;
      bool ok = false;
      for (int attempt = 0; attempt < kMaxRedraws && !ok; ++attempt) {
        rep_rng.shuffle(order.begin() + static_cast<std::ptrdiff_t>(lo), order.end());
        bool seen0 = false, seen1 = false;
        for (std::size_t i = lo; i < lo + n_train; ++i)
          (pooled.labels[order[i]] ? seen1 : seen0) = true;
        ok = seen0 && seen1;
      }
      if (!ok)
        throw ComputeError("ustat_test: could not draw a subset containing both classes");
      const auto idx = std::span<const std::size_t>(order.data() + lo, n_train);
      const LabeledDataset sub = subset_rows(pooled, idx);
      const auto forest = forest::fit(sub, config, rep_rng.split(static_cast<std::uint64_t>(j)), 1);
      row[static_cast<std::size_t>(j)] = forest::oob_error(forest, sub).error;
    }
  });

  const auto d = detail::ustat_decompose(h);

  TestReport r;
  r.test_name = TestName::UStat;
  if (d.v_used > 0.0) {
    r.statistic = (d.u_hat - 0.5) / std::sqrt(d.v_used);
    r.p_value = numkit::normal_cdf(r.statistic);
  } else if (d.u_hat != 0.5) {
    // all subset OOB errors identical but away from 1/2 (e.g. perfectly
    // separated samples): the standardized statistic diverges; report the
    // limit, capped where the normal cdf already saturates in double
    r.statistic = d.u_hat < 0.5 ? -39.0 : 39.0;
    r.p_value = d.u_hat < 0.5 ? 0.0 : 1.0;
  } else {
    throw ComputeError("ustat_test: degenerate variance estimate (every subset OOB "
                       "error is exactly 1/2)");
  }
  r.null_mean = 0.5;
  r.null_sd = std::sqrt(d.v_used);
  r.n_permutations_or_k = k_replicates;
  r.seed = rng.seed();
  r.details = {{"u_hat", d.u_hat},
               {"sigma2_wp", d.sigma2_wp},
               {"sigma2_bp", d.sigma2_bp},
               {"v_hat", d.v_hat},
               {"v_used", d.v_used},
               {"wp_fallback", d.fallback},
               {"alpha", alpha},
               {"reject", r.statistic < numkit::normal_quantile(alpha)},
               {"n_train", n_train},
               {"m_partitions", m_partitions}};
  r.runtime_ms = elapsed_ms(start);
  return r;
}

double tv_estimate(double holdout_error) {
  if (!(holdout_error >= 0.0 && holdout_error <= 1.0))
    throw std::invalid_argument("tv_estimate: holdout error must lie in [0,1]");
  return 1.0 - 2.0 * holdout_error;
}

double asymptotic_power(double alpha, std::size_t m_n, double l_star, double a, double c) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("asymptotic_power: alpha must lie in (0,1)");
  if (m_n < 1) throw std::invalid_argument("asymptotic_power: m_n must be >= 1");
  if (!(l_star >= 0.0 && l_star <= 0.5))
    throw std::invalid_argument("asymptotic_power: l_star must lie in [0, 1/2]");
  if (c < 0.0) throw std::invalid_argument("asymptotic_power: c must be >= 0");
  const double denom2 = l_star * (1.0 - l_star) + c;
  if (denom2 == 0.0) return 1.0;  // l_star = 0, c = 0: the limit has full power
  const double num = numkit::normal_quantile(alpha) * 0.5 +
                     std::sqrt(static_cast<double>(m_n)) * (0.5 - l_star) - a;
  return numkit::normal_cdf(num / std::sqrt(denom2));
}

double ustat_power(double alpha, int k, double l_star, double a, double variance_proxy) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("ustat_power: alpha must lie in (0,1)");
  if (k < 1) throw std::invalid_argument("ustat_power: K must be >= 1");
  if (!(l_star > 0.0 && l_star <= 0.5))
    throw std::invalid_argument("ustat_power: l_star must lie in (0, 1/2]");
  if (!(variance_proxy > 0.0))
    throw std::invalid_argument("ustat_power: variance_proxy must be positive");
  return numkit::normal_cdf(numkit::normal_quantile(alpha) - a +
                            std::sqrt(static_cast<double>(k)) * (0.5 - l_star) /
                                std::sqrt(variance_proxy));
}

}  // namespace rfts::twosample
