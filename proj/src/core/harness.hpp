// Monte-Carlo study orchestration: power curves, level checks and the
// permutation-variance convergence study, with CSV persistence, resume
// support and schedule-independent determinism.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/forest.hpp"
#include "core/scenarios.hpp"
#include "core/twosample.hpp"

namespace rfts::harness {

enum class StudyKind { Power, Level, VarCheck };

std::string study_kind_name(StudyKind k);
StudyKind study_kind_from_name(const std::string& s);

struct TestConfig {
  twosample::TestName method = twosample::TestName::Binomial;
  double alpha = 0.05;
  int k = 100;              // hypoRF permutations / U-stat replicates
  int b = 200;              // MMD permutations
  std::size_t n_train = 0;  // 0 = half of the pooled data
  int m_partitions = 2;
  forest::ForestConfig forest;

  nlohmann::json to_json() const;
  static TestConfig from_json(const nlohmann::json& j);
};

struct StudySpec {
  StudyKind kind = StudyKind::Power;
  std::vector<scenarios::ScenarioSpec> grid;  // power / level grid points
  std::vector<TestConfig> tests;
  int s_runs = 100;
  std::uint64_t base_seed = 1;
  int jobs = 0;  // runtime hint only; excluded from the identity echo

  // var-check settings
  std::vector<int> k_grid;
  int var_n_per_class = 50;
  int var_p = 10;
  forest::ForestConfig var_forest;

  void validate() const;
  nlohmann::json to_json() const;  // identity echo, jobs excluded
  static StudySpec from_json(const nlohmann::json& j);
};

struct StudyRow {
  std::string scenario;  // family name, or the distribution name for level checks
  double knob = 0.0;
  int p = 0;
  int d = 0;
  int n_per_class = 0;
  std::string test;
  int s_runs = 0;
  int rejections = 0;
  int failures = 0;
  std::int64_t mean_runtime_ms = 0;

  double power() const {
    return static_cast<double>(rejections) / static_cast<double>(s_runs);
  }
};

struct VarCheckRow {
  int k = 0;
  int rep = 0;
  double sigma_sq = 0.0;
};

struct StudyResult {
  StudyKind kind = StudyKind::Power;
  nlohmann::json spec_echo;
  std::vector<StudyRow> rows;
  std::vector<VarCheckRow> var_rows;
  std::size_t runs_executed = 0;  // fresh runs this invocation (resume diagnostics)

  bool partial_failure() const;
  std::string to_csv() const;  // full file contents, header included
};

using ProgressFn = std::function<void(const std::string&)>;

// Run a study. Rejection decisions use p_value < alpha (Hoeffding uses its
// threshold form). Per-run streams derive from (base_seed, grid index, run
// index), so results are identical for any jobs setting.
StudyResult run_power_study(const StudySpec& spec, const ProgressFn& progress = {});

// Level check over the named distributions; a thin wrapper that builds a
// LevelCheck grid and runs the power loop (every point is H0).
StudyResult run_level_check(const std::vector<scenarios::LevelDist>& dists, int s_runs,
                            int n_per_class, int p, const std::vector<TestConfig>& tests,
                            std::uint64_t base_seed, int jobs = 0,
                            const ProgressFn& progress = {});

// Permutation-variance convergence study: for each K and repetition, run
// the hypoRF permutation loop on fresh H0 normal data and record the
// empirical variance of the K permuted OOB errors.
StudyResult run_var_check(const StudySpec& spec, const ProgressFn& progress = {});

// Dispatch on spec.kind with resume support: existing complete grid points
// at `csv_path` (written by the same spec) are kept, missing ones are
// computed; the merged result is persisted before returning.
StudyResult run_study(const StudySpec& spec, const std::string& csv_path,
                      const ProgressFn& progress = {});

// CSV plus a JSON metadata sidecar at path + ".meta.json".
void persist(const StudyResult& result, const std::string& csv_path);
StudyResult load(const std::string& csv_path);

// Named one-command reproductions of the simulation-study figures.
std::vector<std::string> preset_names();
StudySpec preset_study(const std::string& name, const std::string& scale,
                       std::uint64_t base_seed);

}  // namespace rfts::harness
