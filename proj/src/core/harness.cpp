#include "core/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "core/format.hpp"
#include "core/mmd.hpp"
#include "core/parallel.hpp"
#include "core/version.hpp"

namespace rfts::harness {

namespace {

using scenarios::Family;
using scenarios::ScenarioSpec;
using twosample::TestName;

nlohmann::json forest_to_json(const forest::ForestConfig& f) {
  return {{"num_trees", f.num_trees},
          {"min_node_size", f.min_node_size},
          {"mtry", f.mtry},
          {"max_depth", f.max_depth},
          {"bootstrap_fraction", f.bootstrap_fraction}};
}

forest::ForestConfig forest_from_json(const nlohmann::json& j) {
  forest::ForestConfig f;
  f.num_trees = j.value("num_trees", f.num_trees);
  f.min_node_size = j.value("min_node_size", f.min_node_size);
  f.mtry = j.value("mtry", f.mtry);
  f.max_depth = j.value("max_depth", f.max_depth);
  f.bootstrap_fraction = j.value("bootstrap_fraction", f.bootstrap_fraction);
  return f;
}

std::string scenario_label(const ScenarioSpec& s) {
  return s.family == Family::LevelCheck ? scenarios::level_dist_name(s.level_dist)
                                        : scenarios::family_name(s.family);
}

std::string row_key(const std::string& scenario, double knob, int p, int d,
                    int n_per_class, const std::string& test) {
  return scenario + "|" + format_double(knob) + "|" + std::to_string(p) + "|" +
         std::to_string(d) + "|" + std::to_string(n_per_class) + "|" + test;
}

}  // namespace

std::string study_kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::Power: return "power";
    case StudyKind::Level: return "level";
    case StudyKind::VarCheck: return "var_check";
  }
  return "?";
}

StudyKind study_kind_from_name(const std::string& s) {
  if (s == "power") return StudyKind::Power;
  if (s == "level") return StudyKind::Level;
  if (s == "var_check") return StudyKind::VarCheck;
  throw std::invalid_argument("unknown study kind: " + s);
}

nlohmann::json TestConfig::to_json() const {
  return {{"method", twosample::test_name_string(method)},
          {"alpha", alpha},
          {"k", k},
          {"b", b},
          {"n_train", n_train},
          {"m_partitions", m_partitions},
          {"forest", forest_to_json(forest)}};
}

TestConfig TestConfig::from_json(const nlohmann::json& j) {
  TestConfig c;
  c.method = twosample::test_name_from_string(j.at("method").get<std::string>());
  c.alpha = j.value("alpha", c.alpha);
  c.k = j.value("k", c.k);
  c.b = j.value("b", c.b);
  c.n_train = j.value("n_train", c.n_train);
  c.m_partitions = j.value("m_partitions", c.m_partitions);
  if (j.contains("forest")) c.forest = forest_from_json(j.at("forest"));
  return c;
}

void StudySpec::validate() const {
  if (s_runs < 1) throw std::invalid_argument("StudySpec: s_runs must be >= 1");
  if (kind == StudyKind::VarCheck) {
    if (k_grid.empty()) throw std::invalid_argument("StudySpec: k_grid must be nonempty");
    for (int k : k_grid)
      if (k < 2) throw std::invalid_argument("StudySpec: every K must be >= 2");
    if (var_n_per_class < 1 || var_p < 1)
      throw std::invalid_argument("StudySpec: var-check n and p must be >= 1");
    var_forest.validate(static_cast<std::size_t>(var_p));
    return;
  }
  if (grid.empty()) throw std::invalid_argument("StudySpec: scenario grid is empty");
  if (tests.empty()) throw std::invalid_argument("StudySpec: test list is empty");
  std::map<std::string, int> seen;
  for (const auto& s : grid) {
    s.validate();
    if (kind == StudyKind::Level && s.family != Family::LevelCheck)
      throw std::invalid_argument("StudySpec: level studies take LevelCheck scenarios");
    const auto key = row_key(scenario_label(s), s.knob, s.p, s.d, s.n_per_class, "");
    if (++seen[key] > 1)
      throw std::invalid_argument("StudySpec: duplicate grid point " + key);
  }
  for (const auto& t : tests) {
    if (!(t.alpha > 0.0 && t.alpha < 1.0))
      throw std::invalid_argument("StudySpec: test alpha must lie in (0,1)");
  }
}

nlohmann::json StudySpec::to_json() const {
  nlohmann::json j{{"kind", study_kind_name(kind)},
                   {"s_runs", s_runs},
                   {"base_seed", base_seed}};
  if (kind == StudyKind::VarCheck) {
    j["k_grid"] = k_grid;
    j["n_per_class"] = var_n_per_class;
    j["p"] = var_p;
    j["forest"] = forest_to_json(var_forest);
    return j;
  }
  auto& grid_json = j["scenarios"] = nlohmann::json::array();
  for (const auto& s : grid) grid_json.push_back(s.to_json());
  auto& tests_json = j["tests"] = nlohmann::json::array();
  for (const auto& t : tests) tests_json.push_back(t.to_json());
  return j;
}

StudySpec StudySpec::from_json(const nlohmann::json& j) {
  StudySpec s;
  s.kind = study_kind_from_name(j.value("kind", std::string("power")));
  s.s_runs = j.at("s_runs").get<int>();
  s.base_seed = j.value("base_seed", std::uint64_t{1});
  s.jobs = j.value("jobs", 0);
  if (s.kind == StudyKind::VarCheck) {
    s.k_grid = j.at("k_grid").get<std::vector<int>>();
    s.var_n_per_class = j.value("n_per_class", 50);
    s.var_p = j.value("p", 10);
    if (j.contains("forest")) s.var_forest = forest_from_json(j.at("forest"));
  } else {
    for (const auto& sj : j.at("scenarios"))
      s.grid.push_back(ScenarioSpec::from_json(sj));
    for (const auto& tj : j.at("tests")) s.tests.push_back(TestConfig::from_json(tj));
  }
  s.validate();
  return s;
}

bool StudyResult::partial_failure() const {
  for (const auto& r : rows)
    if (r.failures * 10 > r.s_runs) return true;
  return false;
}

std::string StudyResult::to_csv() const {
  std::string out;
  if (kind == StudyKind::VarCheck) {
    out += "K,rep,sigma_sq\n";
    for (const auto& r : var_rows)
      out += std::to_string(r.k) + "," + std::to_string(r.rep) + "," +
             format_double(r.sigma_sq) + "\n";
    return out;
  }
  out += "scenario_family,knob,p,d,n_per_class,test,S,rejections,power,failures,"
         "mean_runtime_ms\n";
  for (const auto& r : rows)
    out += r.scenario + "," + format_double(r.knob) + "," + std::to_string(r.p) + "," +
           std::to_string(r.d) + "," + std::to_string(r.n_per_class) + "," + r.test +
           "," + std::to_string(r.s_runs) + "," + std::to_string(r.rejections) + "," +
           format_double(r.power()) + "," + std::to_string(r.failures) + "," +
           std::to_string(r.mean_runtime_ms) + "\n";
  return out;
}

namespace {

struct RunOutcome {
  bool rejected = false;
  bool failed = false;
  std::int64_t ms = 0;
};

RunOutcome execute_test(const TestConfig& cfg, const scenarios::SamplePair& pair,
                        numkit::RngStream rng) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::size_t total = pair.x.rows() + pair.y.rows();
    switch (cfg.method) {
      case TestName::Binomial: {
        auto plan = twosample::SplitPlan::half_split(total);
        if (cfg.n_train > 0) plan = {cfg.n_train, total - cfg.n_train, {}};
        const auto r = twosample::binomial_test(
            pair.x, pair.y, classifiers::ClassifierSpec::random_forest(cfg.forest), plan,
            rng, 1);
        out.rejected = *r.p_value < cfg.alpha;
        break;
      }
      case TestName::Hoeffding: {
        auto plan = twosample::SplitPlan::half_split(total);
        if (cfg.n_train > 0) plan = {cfg.n_train, total - cfg.n_train, {}};
        const auto r = twosample::hoeffding_test(
            pair.x, pair.y, classifiers::ClassifierSpec::random_forest(cfg.forest), plan,
            cfg.alpha, rng, 1);
        out.rejected = r.reject_at->at(format_double(cfg.alpha));
        break;
      }
      case TestName::HypoRF: {
        const auto r = twosample::hyporf_test(pair.x, pair.y, cfg.forest, cfg.k, rng, 1);
        out.rejected = *r.p_value < cfg.alpha;
        break;
      }
      case TestName::UStat: {
        const std::size_t n_train = cfg.n_train > 0 ? cfg.n_train : total / 2;
        const auto r = twosample::ustat_test(pair.x, pair.y, cfg.forest, cfg.k, n_train,
                                             cfg.m_partitions, cfg.alpha, rng, 1);
        out.rejected = *r.p_value < cfg.alpha;
        break;
      }
      case TestName::MMDBoot: {
        const auto r = mmd::mmd_boot_test(pair.x, pair.y, {}, cfg.b, rng, 1);
        out.rejected = *r.p_value < cfg.alpha;
        break;
      }
    }
  } catch (const std::exception&) {
    out.failed = true;
  }
  out.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start)
               .count();
  return out;
}

std::vector<StudyRow> run_grid_point(const StudySpec& spec, std::size_t gi) {
  ScenarioSpec scenario = spec.grid[gi];
  // the blob alternative shares one correlation draw across the whole study
  if (scenario.family == Family::BlobCorrelation && scenario.sigma_seed == 0)
    scenario.sigma_seed = numkit::hash_combine(spec.base_seed, 0xB10B + gi);

  const auto s_runs = static_cast<std::size_t>(spec.s_runs);
  const auto n_tests = spec.tests.size();
  std::vector<RunOutcome> outcomes(s_runs * n_tests);

  parallel_for(s_runs, spec.jobs, [&](std::size_t s) {
    numkit::RngStream run_rng(spec.base_seed, numkit::hash_combine(gi, s));
    scenarios::SamplePair pair;
    bool sample_failed = false;
    try {
      auto draw_rng = run_rng.split(0);
      pair = scenarios::sample(scenario, draw_rng);
    } catch (const std::exception&) {
      sample_failed = true;
    }
    for (std::size_t ti = 0; ti < n_tests; ++ti) {
      auto& slot = outcomes[s * n_tests + ti];
      if (sample_failed)
        slot.failed = true;
      else
        slot = execute_test(spec.tests[ti], pair, run_rng.split(1 + ti));
    }
  });

  std::vector<StudyRow> rows(n_tests);
  for (std::size_t ti = 0; ti < n_tests; ++ti) {
    StudyRow& row = rows[ti];
    row.scenario = scenario_label(scenario);
    row.knob = scenario.knob;
    row.p = scenario.p;
    row.d = scenario.d;
    row.n_per_class = scenario.n_per_class;
    row.test = twosample::test_name_string(spec.tests[ti].method);
    row.s_runs = spec.s_runs;
    std::int64_t total_ms = 0;
    for (std::size_t s = 0; s < s_runs; ++s) {
      const auto& o = outcomes[s * n_tests + ti];
      row.rejections += o.rejected && !o.failed;
      row.failures += o.failed;
      total_ms += o.ms;
    }
    row.mean_runtime_ms = total_ms / static_cast<std::int64_t>(s_runs);
  }
  return rows;
}

std::vector<VarCheckRow> run_var_point(const StudySpec& spec, std::size_t ki) {
  const int k_perm = spec.k_grid[ki];
  const auto s_runs = static_cast<std::size_t>(spec.s_runs);
  std::vector<VarCheckRow> rows(s_runs);

  ScenarioSpec h0;
  h0.family = Family::LevelCheck;
  h0.level_dist = scenarios::LevelDist::RNorm;
  h0.p = spec.var_p;
  h0.n_per_class = spec.var_n_per_class;

  parallel_for(s_runs, spec.jobs, [&](std::size_t rep) {
    numkit::RngStream rng(spec.base_seed,
                          numkit::hash_combine(0x7a5c + ki, rep));
    auto draw_rng = rng.split(0);
    const auto pair = scenarios::sample_level_check(h0, draw_rng);
    const auto pooled = pool_samples(pair.x, pair.y);
    const auto run =
        twosample::detail::hyporf_run(pooled, spec.var_forest, k_perm, rng.split(1), 1);
    double mu = 0.0;
    for (double v : run.permuted) mu += v;
    mu /= static_cast<double>(k_perm);
    double var = 0.0;
    for (double v : run.permuted) var += (v - mu) * (v - mu);
    var /= static_cast<double>(k_perm - 1);
    rows[rep] = {k_perm, static_cast<int>(rep), var};
  });
  return rows;
}

}  // namespace

StudyResult run_power_study(const StudySpec& spec, const ProgressFn& progress) {
  spec.validate();
  if (spec.kind == StudyKind::VarCheck)
    throw std::invalid_argument("run_power_study: got a var-check spec");
  StudyResult res;
  res.kind = spec.kind;
  res.spec_echo = spec.to_json();
  for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
    auto rows = run_grid_point(spec, gi);
    res.runs_executed += static_cast<std::size_t>(spec.s_runs);
    if (progress)
      for (const auto& r : rows)
        progress(r.scenario + " knob=" + format_double(r.knob) + " " + r.test +
                 ": power=" + format_double(r.power()) + " (" +
                 std::to_string(r.rejections) + "/" + std::to_string(r.s_runs) + ")");
    res.rows.insert(res.rows.end(), rows.begin(), rows.end());
  }
  return res;
}

StudyResult run_level_check(const std::vector<scenarios::LevelDist>& dists, int s_runs,
                            int n_per_class, int p, const std::vector<TestConfig>& tests,
                            std::uint64_t base_seed, int jobs,
                            const ProgressFn& progress) {
  StudySpec spec;
  spec.kind = StudyKind::Level;
  spec.s_runs = s_runs;
  spec.base_seed = base_seed;
  spec.jobs = jobs;
  spec.tests = tests;
  for (auto d : dists) {
    ScenarioSpec s;
    s.family = Family::LevelCheck;
    s.level_dist = d;
    s.p = p;
    s.n_per_class = n_per_class;
    spec.grid.push_back(s);
  }
  return run_power_study(spec, progress);
}

StudyResult run_var_check(const StudySpec& spec, const ProgressFn& progress) {
  spec.validate();
  if (spec.kind != StudyKind::VarCheck)
    throw std::invalid_argument("run_var_check: spec kind must be var_check");
  StudyResult res;
  res.kind = spec.kind;
  res.spec_echo = spec.to_json();
  for (std::size_t ki = 0; ki < spec.k_grid.size(); ++ki) {
    auto rows = run_var_point(spec, ki);
    res.runs_executed += rows.size();
    if (progress)
      progress("var-check K=" + std::to_string(spec.k_grid[ki]) + ": " +
               std::to_string(rows.size()) + " repetitions");
    res.var_rows.insert(res.var_rows.end(), rows.begin(), rows.end());
  }
  return res;
}

void persist(const StudyResult& result, const std::string& csv_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("persist: cannot open " + csv_path + " for writing");
    csv << result.to_csv();
    if (!csv) throw IoError("persist: write failed for " + csv_path);
  }
  nlohmann::json meta{{"schema_version", kResultSchemaVersion},
                      {"artifact_version", kVersion},
                      {"kind", study_kind_name(result.kind)},
                      {"spec", result.spec_echo}};
  const std::string meta_path = csv_path + ".meta.json";
  std::ofstream mf(meta_path, std::ios::binary | std::ios::trunc);
  if (!mf) throw IoError("persist: cannot open " + meta_path + " for writing");
  mf << meta.dump(2) << "\n";
  if (!mf) throw IoError("persist: write failed for " + meta_path);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

StudyResult load(const std::string& csv_path) {
  const std::string meta_path = csv_path + ".meta.json";
  std::ifstream mf(meta_path);
  if (!mf) throw IoError("load: cannot open " + meta_path);
  nlohmann::json meta;
  try {
    mf >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("load: " + meta_path + " is not valid JSON: " + e.what());
  }
  if (!meta.contains("schema_version") ||
      meta.at("schema_version").get<int>() != kResultSchemaVersion)
    throw IoError("load: result schema version mismatch in " + meta_path +
                  " (expected " + std::to_string(kResultSchemaVersion) + ", found " +
                  (meta.contains("schema_version") ? meta.at("schema_version").dump()
                                                   : std::string("none")) +
                  ")");

  StudyResult res;
  res.kind = study_kind_from_name(meta.at("kind").get<std::string>());
  res.spec_echo = meta.at("spec");

  std::ifstream csv(csv_path);
  if (!csv) throw IoError("load: cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line)) throw IoError("load: " + csv_path + " is empty");
  std::size_t line_no = 1;
  try {
    while (std::getline(csv, line)) {
      ++line_no;
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (res.kind == StudyKind::VarCheck) {
        if (f.size() != 3) throw std::invalid_argument("expected 3 columns");
        res.var_rows.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stod(f[2])});
      } else {
        if (f.size() != 11) throw std::invalid_argument("expected 11 columns");
        StudyRow r;
        r.scenario = f[0];
        r.knob = std::stod(f[1]);
        r.p = std::stoi(f[2]);
        r.d = std::stoi(f[3]);
        r.n_per_class = std::stoi(f[4]);
        r.test = f[5];
        r.s_runs = std::stoi(f[6]);
        r.rejections = std::stoi(f[7]);
        r.failures = std::stoi(f[9]);
        r.mean_runtime_ms = std::stoll(f[10]);
        res.rows.push_back(r);
      }
    }
  } catch (const std::exception& e) {
    throw IoError("load: " + csv_path + " line " + std::to_string(line_no) +
                  ": " + e.what());
  }
  return res;
}

StudyResult run_study(const StudySpec& spec, const std::string& csv_path,
                      const ProgressFn& progress) {
  spec.validate();

  std::optional<StudyResult> old;
  if (std::filesystem::exists(csv_path) &&
      std::filesystem::exists(csv_path + ".meta.json")) {
    try {
      auto loaded = load(csv_path);
      if (loaded.spec_echo == spec.to_json()) {
        old = std::move(loaded);
      } else if (progress) {
        progress("existing result at " + csv_path + " was produced by a different "
                 "spec; recomputing from scratch");
      }
    } catch (const std::exception& e) {
      if (progress)
        progress("existing result at " + csv_path + " is unreadable (" + e.what() +
                 "); recomputing from scratch");
    }
  }

  StudyResult res;
  res.kind = spec.kind;
  res.spec_echo = spec.to_json();

  if (spec.kind == StudyKind::VarCheck) {
    std::map<int, std::vector<VarCheckRow>> old_by_k;
    if (old)
      for (const auto& r : old->var_rows) old_by_k[r.k].push_back(r);
    for (std::size_t ki = 0; ki < spec.k_grid.size(); ++ki) {
      const int k = spec.k_grid[ki];
      auto it = old_by_k.find(k);
      if (it != old_by_k.end() &&
          it->second.size() == static_cast<std::size_t>(spec.s_runs)) {
        res.var_rows.insert(res.var_rows.end(), it->second.begin(), it->second.end());
        if (progress) progress("var-check K=" + std::to_string(k) + ": reused");
        continue;
      }
      auto rows = run_var_point(spec, ki);
      res.runs_executed += rows.size();
      if (progress) progress("var-check K=" + std::to_string(k) + ": computed");
      res.var_rows.insert(res.var_rows.end(), rows.begin(), rows.end());
      persist(res, csv_path);  // checkpoint so interrupted studies resume here
    }
  } else {
    std::map<std::string, StudyRow> old_rows;
    if (old)
      for (const auto& r : old->rows)
        old_rows[row_key(r.scenario, r.knob, r.p, r.d, r.n_per_class, r.test)] = r;
    for (std::size_t gi = 0; gi < spec.grid.size(); ++gi) {
      const auto& sc = spec.grid[gi];
      const auto label = scenario_label(sc);
      bool complete = !old_rows.empty();
      std::vector<StudyRow> reused;
      for (const auto& t : spec.tests) {
        const auto it = old_rows.find(row_key(label, sc.knob, sc.p, sc.d, sc.n_per_class,
                                              twosample::test_name_string(t.method)));
        if (it == old_rows.end() || it->second.s_runs != spec.s_runs) {
          complete = false;
          break;
        }
        reused.push_back(it->second);
      }
      if (complete) {
        res.rows.insert(res.rows.end(), reused.begin(), reused.end());
        if (progress) progress(label + " knob=" + format_double(sc.knob) + ": reused");
        continue;
      }
      auto rows = run_grid_point(spec, gi);
      res.runs_executed += static_cast<std::size_t>(spec.s_runs);
      if (progress)
        for (const auto& r : rows)
          progress(r.scenario + " knob=" + format_double(r.knob) + " " + r.test +
                   ": power=" + format_double(r.power()) + " (" +
                   std::to_string(r.rejections) + "/" + std::to_string(r.s_runs) + ")");
      res.rows.insert(res.rows.end(), rows.begin(), rows.end());
      persist(res, csv_path);  // checkpoint so interrupted studies resume here
    }
  }

  persist(res, csv_path);
  return res;
}

// ---------------------------------------------------------------------------
// presets

namespace {

struct Scale {
  bool full = false;
  int n() const { return full ? 300 : 100; }
  int p() const { return full ? 200 : 20; }
  int s() const { return full ? 200 : 100; }
  forest::ForestConfig forest() const {
    forest::ForestConfig f;
    f.num_trees = full ? 600 : 300;
    f.min_node_size = 4;
    return f;
  }
};

std::vector<double> arithmetic_grid(double from, double to, double step) {
  std::vector<double> g;
  for (int i = 0;; ++i) {
    const double v = from + step * i;
    if (v > to + 1e-9) break;
    g.push_back(std::min(v, to));
  }
  return g;
}

std::vector<TestConfig> standard_tests(const forest::ForestConfig& f, bool with_ustat) {
  std::vector<TestConfig> tests;
  TestConfig binomial;
  binomial.method = TestName::Binomial;
  binomial.forest = f;
  tests.push_back(binomial);
  TestConfig hyporf;
  hyporf.method = TestName::HypoRF;
  hyporf.k = 100;
  hyporf.forest = f;
  tests.push_back(hyporf);
  if (with_ustat) {
    TestConfig ustat;
    ustat.method = TestName::UStat;
    ustat.k = 50;
    ustat.m_partitions = 2;
    ustat.forest = f;
    tests.push_back(ustat);
  }
  TestConfig mmd;
  mmd.method = TestName::MMDBoot;
  mmd.b = 200;
  tests.push_back(mmd);
  return tests;
}

ScenarioSpec make_scenario(Family family, int p, int d, double knob, int n) {
  ScenarioSpec s;
  s.family = family;
  s.p = p;
  s.d = d;
  s.knob = knob;
  s.n_per_class = n;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"meanshift-dense",   "meanshift-moderate", "meanshift-sparse",
          "contamination",     "contamination-dense", "correlation-dense",
          "correlation-sparse", "tcopula-dense",      "tcopula-sparse",
          "blob-table1",       "blob-variance",       "level-all"};
}

StudySpec preset_study(const std::string& name, const std::string& scale_name,
                       std::uint64_t base_seed) {
  Scale scale;
  if (scale_name == "full")
    scale.full = true;
  else if (scale_name != "desk")
    throw std::invalid_argument("preset_study: scale must be 'desk' or 'full'");

  StudySpec spec;
  spec.kind = StudyKind::Power;
  spec.s_runs = scale.s();
  spec.base_seed = base_seed;
  spec.tests = standard_tests(scale.forest(), /*with_ustat=*/false);

  const int n = scale.n();
  const int p = scale.p();
  const auto delta_grid = scale.full ? arithmetic_grid(0.0, 1.0, 0.125)
                                      : std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0};

  if (name == "meanshift-dense") {
    const auto grid =
        scale.full ? arithmetic_grid(0.0, 1.0, 1.0 / 15.0) : delta_grid;
    for (double delta : grid)
      spec.grid.push_back(make_scenario(Family::MeanShift, p, p, delta, n));
  } else if (name == "meanshift-moderate") {
    const int d = std::max(1, p / 10);
    for (double delta : delta_grid)
      spec.grid.push_back(make_scenario(Family::MeanShift, p, d, delta, n));
  } else if (name == "meanshift-sparse") {
    for (double delta : delta_grid)
      spec.grid.push_back(make_scenario(Family::MeanShift, p, 2, delta, n));
  } else if (name == "contamination" || name == "contamination-dense") {
    const int d = name == "contamination" ? std::max(1, p / 10) : p;
    const auto grid = scale.full ? arithmetic_grid(0.5, 1.0, 0.05)
                                  : std::vector<double>{0.5, 0.75, 1.0};
    for (double lambda : grid)
      spec.grid.push_back(make_scenario(Family::Contamination, p, d, lambda, n));
  } else if (name == "correlation-dense") {
    const auto grid = scale.full ? arithmetic_grid(0.0, 0.15, 0.01)
                                  : std::vector<double>{0.0, 0.05, 0.1, 0.15};
    for (double rho : grid)
      spec.grid.push_back(make_scenario(Family::CorrelatedGaussian, p,
                                        p * (p - 1) / 2, rho, n));
  } else if (name == "correlation-sparse") {
    const auto grid = scale.full ? arithmetic_grid(0.0, 0.375, 0.025)
                                  : std::vector<double>{0.0, 0.125, 0.25, 0.375};
    for (double rho : grid)
      spec.grid.push_back(make_scenario(Family::CorrelatedGaussian, 10, 4, rho, n));
  } else if (name == "tcopula-dense") {
    const int pc = scale.full ? 60 : p;
    const auto grid = scale.full ? arithmetic_grid(1.0, 8.0, 0.5)
                                  : std::vector<double>{1.0, 2.0, 4.0, 8.0};
    for (double nu : grid)
      spec.grid.push_back(make_scenario(Family::TCopula, pc, pc, nu, n));
  } else if (name == "tcopula-sparse") {
    const int d = std::max(1, p / 10);
    const auto grid = scale.full ? arithmetic_grid(1.0, 8.0, 0.5)
                                  : std::vector<double>{1.0, 2.0, 4.0, 8.0};
    for (double nu : grid)
      spec.grid.push_back(make_scenario(Family::TCopula, p, d, nu, n));
  } else if (name == "blob-table1") {
    spec.s_runs = scale.full ? 500 : scale.s();
    for (const auto& [bp, bd] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}})
      spec.grid.push_back(make_scenario(Family::BlobCorrelation, bp, bd, 1.0, n));
  } else if (name == "blob-variance") {
    const auto ps = scale.full
                        ? std::vector<int>{2, 4, 6, 8, 10, 20, 40, 80, 120, 200}
                        : std::vector<int>{2, 10, 20};
    for (int bp : ps)
      spec.grid.push_back(make_scenario(Family::BlobVariance, bp, 1, 2.0, n));
  } else if (name == "level-all") {
    spec.kind = StudyKind::Level;
    spec.tests = standard_tests(scale.forest(), /*with_ustat=*/true);
    for (auto dist : scenarios::level_dist_catalog()) {
      ScenarioSpec s;
      s.family = Family::LevelCheck;
      s.level_dist = dist;
      s.p = p;
      s.n_per_class = n;
      spec.grid.push_back(s);
    }
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  spec.validate();
  return spec;
}

}  // namespace rfts::harness
