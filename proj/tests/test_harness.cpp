#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/harness.hpp"

using namespace rfts;
using namespace rfts::harness;

namespace {

namespace fs = std::filesystem;

struct TempPath {
  fs::path path;
  explicit TempPath(const std::string& name)
      : path(fs::temp_directory_path() / ("rfts_test_" + name)) {
    std::error_code ec;
    fs::remove(path, ec);
    fs::remove(fs::path(path.string() + ".meta.json"), ec);
  }
  ~TempPath() {
    std::error_code ec;
    fs::remove(path, ec);
    fs::remove(fs::path(path.string() + ".meta.json"), ec);
  }
  std::string str() const { return path.string(); }
};

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// drop the wall-clock column (the one nondeterministic field)
std::string strip_runtime(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << line.substr(0, pos) << "\n";
  }
  return out.str();
}

StudySpec tiny_power_spec(std::uint64_t seed) {
  StudySpec spec;
  spec.kind = StudyKind::Power;
  spec.s_runs = 8;
  spec.base_seed = seed;
  scenarios::ScenarioSpec null_pt, alt_pt;
  null_pt.family = scenarios::Family::MeanShift;
  null_pt.p = 2;
  null_pt.d = 2;
  null_pt.knob = 0.0;
  null_pt.n_per_class = 20;
  alt_pt = null_pt;
  alt_pt.knob = 6.0;  // per-coordinate shift 6/sqrt(2)
  spec.grid = {null_pt, alt_pt};

  TestConfig binom;
  binom.method = twosample::TestName::Binomial;
  binom.forest.num_trees = 20;
  TestConfig mmd;
  mmd.method = twosample::TestName::MMDBoot;
  mmd.b = 60;
  spec.tests = {binom, mmd};
  return spec;
}

}  // namespace

TEST_CASE("study spec validation") {
  StudySpec empty;
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

  auto spec = tiny_power_spec(1);
  spec.grid.push_back(spec.grid.front());  // duplicate grid point
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = tiny_power_spec(1);
  spec.tests.front().alpha = 1.5;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  StudySpec var;
  var.kind = StudyKind::VarCheck;
  var.k_grid = {1};
  CHECK_THROWS_AS(var.validate(), std::invalid_argument);
  var.k_grid = {4, 6};
  var.s_runs = 2;
  var.validate();
}

TEST_CASE("study spec json round trip excludes the jobs hint") {
  auto spec = tiny_power_spec(7);
  spec.jobs = 3;
  const auto j = spec.to_json();
  CHECK_FALSE(j.contains("jobs"));
  const auto back = StudySpec::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.grid.size() == 2);
  CHECK(back.tests.size() == 2);
  CHECK(back.tests[0].forest.num_trees == 20);
}

TEST_CASE("presets build valid specs at both scales") {
  for (const auto& name : preset_names()) {
    for (const std::string scale : {"desk", "full"}) {
      const auto spec = preset_study(name, scale, 42);
      spec.validate();
      CHECK_FALSE(spec.grid.empty());
      CHECK(spec.base_seed == 42);
    }
  }
  CHECK_THROWS_AS(preset_study("bogus", "desk", 1), std::invalid_argument);
  CHECK_THROWS_AS(preset_study("level-all", "galactic", 1), std::invalid_argument);

  const auto level = preset_study("level-all", "desk", 1);
  CHECK(level.kind == StudyKind::Level);
  CHECK(level.grid.size() == 15);
  CHECK(level.tests.size() == 4);

  const auto blob = preset_study("blob-table1", "full", 1);
  CHECK(blob.s_runs == 500);
  CHECK(blob.grid.size() == 4);
  CHECK(blob.grid[0].n_per_class == 300);

  const auto dense = preset_study("meanshift-dense", "full", 1);
  CHECK(dense.grid.size() == 16);  // delta = k/15 grid
}

TEST_CASE("run_power_study: null point at level, strong point at full power") {
  const auto spec = tiny_power_spec(11);
  const auto res = run_power_study(spec);
  REQUIRE(res.rows.size() == 4);  // 2 grid points x 2 tests
  for (const auto& row : res.rows) {
    CHECK(row.s_runs == 8);
    CHECK(row.failures == 0);
    CHECK(row.rejections >= 0);
    CHECK(row.rejections <= 8);
    if (row.knob == 0.0)
      CHECK(row.rejections <= 3);  // level-ish
    else
      CHECK(row.rejections >= 7);  // a 6-sigma shift is unmissable
  }
  CHECK(res.runs_executed == 16);
  CHECK_FALSE(res.partial_failure());
}

TEST_CASE("determinism: csv identical across jobs settings") {
  auto spec = tiny_power_spec(13);
  spec.jobs = 1;
  const auto r1 = run_power_study(spec);
  spec.jobs = 2;
  const auto r2 = run_power_study(spec);
  spec.jobs = 5;
  const auto r3 = run_power_study(spec);
  CHECK(strip_runtime(r1.to_csv()) == strip_runtime(r2.to_csv()));
  CHECK(strip_runtime(r1.to_csv()) == strip_runtime(r3.to_csv()));
  // rejections per row must match exactly, not just in aggregate
  for (std::size_t i = 0; i < r1.rows.size(); ++i)
    CHECK(r1.rows[i].rejections == r2.rows[i].rejections);
}

TEST_CASE("csv schema: stable documented column order") {
  const auto res = run_power_study(tiny_power_spec(17));
  const auto csv = res.to_csv();
  CHECK(csv.rfind("scenario_family,knob,p,d,n_per_class,test,S,rejections,power,"
                  "failures,mean_runtime_ms\n",
                  0) == 0);
  // level rows carry the distribution name in the scenario column
  TestConfig binom;
  binom.method = twosample::TestName::Binomial;
  binom.forest.num_trees = 10;
  const auto level = run_level_check({scenarios::LevelDist::RNorm}, 2, 8, 2, {binom}, 3);
  REQUIRE(level.rows.size() == 1);
  CHECK(level.rows[0].scenario == "rnorm");
  CHECK(level.kind == StudyKind::Level);
}

TEST_CASE("run_var_check: positive variance estimates, one row per (K, rep)") {
  StudySpec spec;
  spec.kind = StudyKind::VarCheck;
  spec.k_grid = {4, 6};
  spec.s_runs = 3;
  spec.var_n_per_class = 10;
  spec.var_p = 2;
  spec.var_forest.num_trees = 20;
  spec.base_seed = 5;
  const auto res = run_var_check(spec);
  REQUIRE(res.var_rows.size() == 6);
  for (const auto& row : res.var_rows) CHECK(row.sigma_sq > 0.0);
  CHECK(res.var_rows[0].k == 4);
  CHECK(res.var_rows[5].k == 6);
  const auto csv = res.to_csv();
  CHECK(csv.rfind("K,rep,sigma_sq\n", 0) == 0);
}

TEST_CASE("persist and load round trip") {
  TempPath tmp("roundtrip.csv");
  const auto res = run_power_study(tiny_power_spec(19));
  persist(res, tmp.str());
  const auto back = load(tmp.str());
  CHECK(back.kind == res.kind);
  CHECK(back.spec_echo == res.spec_echo);
  REQUIRE(back.rows.size() == res.rows.size());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    CHECK(back.rows[i].scenario == res.rows[i].scenario);
    CHECK(back.rows[i].knob == res.rows[i].knob);
    CHECK(back.rows[i].rejections == res.rows[i].rejections);
    CHECK(back.rows[i].failures == res.rows[i].failures);
    CHECK(back.rows[i].mean_runtime_ms == res.rows[i].mean_runtime_ms);
  }
  CHECK(back.to_csv() == res.to_csv());
}

TEST_CASE("load rejects a result written under a different schema version") {
  TempPath tmp("versioned.csv");
  const auto res = run_power_study(tiny_power_spec(23));
  persist(res, tmp.str());
  const auto meta_path = tmp.str() + ".meta.json";
  auto meta = nlohmann::json::parse(read_file(meta_path));
  meta["schema_version"] = 99;
  std::ofstream(meta_path) << meta.dump(2);
  CHECK_THROWS_AS(load(tmp.str()), IoError);
  CHECK_THROWS_AS(load("/nonexistent/path.csv"), IoError);
}

TEST_CASE("run_study resume: completed grid points are not recomputed") {
  TempPath tmp("resume.csv");
  const auto spec = tiny_power_spec(29);
  const auto first = run_study(spec, tmp.str());
  CHECK(first.runs_executed == 16);
  const std::string full_csv = read_file(tmp.str());

  // rerun untouched: everything reused, byte-identical file
  const auto rerun = run_study(spec, tmp.str());
  CHECK(rerun.runs_executed == 0);
  CHECK(read_file(tmp.str()) == full_csv);

  // drop the second grid point's rows and resume: only it is recomputed
  {
    std::stringstream in(full_csv);
    std::ofstream out(tmp.str(), std::ios::binary | std::ios::trunc);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("mean_shift,6,", 0) != 0) out << line << "\n";
  }
  const auto resumed = run_study(spec, tmp.str());
  CHECK(resumed.runs_executed == 8);
  CHECK(strip_runtime(read_file(tmp.str())) == strip_runtime(full_csv));

  // a different spec at the same path recomputes from scratch
  auto other = tiny_power_spec(31);
  const auto fresh = run_study(other, tmp.str());
  CHECK(fresh.runs_executed == 16);
}

TEST_CASE("run_study resume for var-check grid points") {
  TempPath tmp("var_resume.csv");
  StudySpec spec;
  spec.kind = StudyKind::VarCheck;
  spec.k_grid = {4, 6};
  spec.s_runs = 2;
  spec.var_n_per_class = 8;
  spec.var_p = 2;
  spec.var_forest.num_trees = 16;
  spec.base_seed = 37;
  const auto first = run_study(spec, tmp.str());
  CHECK(first.runs_executed == 4);
  const auto rerun = run_study(spec, tmp.str());
  CHECK(rerun.runs_executed == 0);
  CHECK(rerun.to_csv() == first.to_csv());
}

TEST_CASE("conservation: rejections plus failures never exceed S") {
  const auto res = run_power_study(tiny_power_spec(41));
  for (const auto& row : res.rows) {
    CHECK(row.rejections + row.failures <= row.s_runs);
    CHECK(row.power() == doctest::Approx(static_cast<double>(row.rejections) / 8.0));
  }
}
