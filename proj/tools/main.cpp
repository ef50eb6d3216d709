// rfts command-line interface. Talks to the core exclusively through the
// public C API in rfts/rfts.h.
//
// Exit codes: 0 success, 2 usage or input error, 3 computation error,
// 4 study finished with partial failures.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfts/rfts.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCompute = 3;
constexpr int kExitPartial = 4;

struct CsvError {
  std::string message;
};

struct CsvData {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t\r");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return fields;
}

bool parse_cell(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Rows are observations, columns features. A non-numeric first row is
// treated as a header.
CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError{"cannot open " + path};
  CsvData data;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (first_content_line) {
      first_content_line = false;
      bool numeric = true;
      double tmp;
      for (const auto& f : fields)
        if (!parse_cell(f, tmp)) {
          numeric = false;
          break;
        }
      data.cols = fields.size();
      if (!numeric) continue;  // header row
    }
    if (fields.size() != data.cols)
      throw CsvError{path + " line " + std::to_string(line_no) + ": expected " +
                     std::to_string(data.cols) + " columns, found " +
                     std::to_string(fields.size())};
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!parse_cell(fields[c], v))
        throw CsvError{path + " line " + std::to_string(line_no) + ", column " +
                       std::to_string(c + 1) + ": '" + fields[c] + "' is not numeric"};
      data.values.push_back(v);
    }
    ++data.rows;
  }
  if (data.rows == 0) throw CsvError{path + ": no data rows"};
  return data;
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { rfts_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int status_to_exit(rfts_status s) {
  switch (s) {
    case RFTS_OK: return kExitOk;
    case RFTS_ERR_INVALID: return kExitUsage;
    case RFTS_ERR_IO: return kExitUsage;
    case RFTS_ERR_COMPUTE: return kExitCompute;
    case RFTS_ERR_PARTIAL: return kExitPartial;
  }
  return kExitCompute;
}

void print_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

std::uint64_t default_seed() {
  if (const char* env = std::getenv("RFTS_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return 1;
}

// flags shared by every subcommand that trains forests
struct ForestFlags {
  int trees = 600;
  int min_node_size = 4;
  int mtry = 0;
  int max_depth = 0;
  double bootstrap_fraction = 1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--trees", trees, "Trees per forest")->capture_default_str();
    cmd->add_option("--min-node-size", min_node_size,
                    "Smallest node a split is attempted in")
        ->capture_default_str();
    cmd->add_option("--mtry", mtry, "Features tried per split (0 = floor(sqrt(p)))")
        ->capture_default_str();
    cmd->add_option("--max-depth", max_depth, "Tree depth cap (0 = unlimited)")
        ->capture_default_str();
    cmd->add_option("--bootstrap-fraction", bootstrap_fraction,
                    "Bootstrap size as a fraction of n")
        ->capture_default_str();
  }

  nlohmann::json to_json() const {
    return {{"num_trees", trees},
            {"min_node_size", min_node_size},
            {"mtry", mtry},
            {"max_depth", max_depth},
            {"bootstrap_fraction", bootstrap_fraction}};
  }
};

int run_reported_study(const std::string& spec_json, const std::string& output) {
  OwnedString summary;
  const auto status = rfts_run_study(spec_json.c_str(), output.c_str(), print_progress,
                                     nullptr, &summary.ptr);
  if (status == RFTS_OK || status == RFTS_ERR_PARTIAL) {
    std::cout << "wrote " << output << "\n";
    if (status == RFTS_ERR_PARTIAL)
      std::cerr << "warning: " << rfts_last_error() << "\n";
    return status_to_exit(status);
  }
  std::cerr << "error: " << rfts_last_error() << "\n";
  return status_to_exit(status);
}

int cmd_test(const std::string& method, const std::string& x_path,
             const std::string& y_path, double alpha, int k, int b, std::size_t n_train,
             int m_partitions, const ForestFlags& forest, std::uint64_t seed, int jobs,
             const std::string& format) {
  CsvData x, y;
  try {
    x = read_csv(x_path);
    y = read_csv(y_path);
  } catch (const CsvError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kExitUsage;
  }
  if (x.cols != y.cols) {
    std::cerr << "error: column count mismatch: " << x_path << " has " << x.cols
              << " columns, " << y_path << " has " << y.cols << " columns\n";
    return kExitUsage;
  }

  std::unique_ptr<rfts_options, decltype(&rfts_options_free)> opts(rfts_options_new(),
                                                                   &rfts_options_free);
  rfts_options_set_f64(opts.get(), "alpha", alpha);
  rfts_options_set_f64(opts.get(), "k", k);
  rfts_options_set_f64(opts.get(), "b", b);
  rfts_options_set_f64(opts.get(), "n_train", static_cast<double>(n_train));
  rfts_options_set_f64(opts.get(), "m_partitions", m_partitions);
  rfts_options_set_f64(opts.get(), "trees", forest.trees);
  rfts_options_set_f64(opts.get(), "min_node_size", forest.min_node_size);
  rfts_options_set_f64(opts.get(), "mtry", forest.mtry);
  rfts_options_set_f64(opts.get(), "max_depth", forest.max_depth);
  rfts_options_set_f64(opts.get(), "bootstrap_fraction", forest.bootstrap_fraction);
  rfts_options_set_u64(opts.get(), "seed", seed);
  rfts_options_set_f64(opts.get(), "jobs", jobs);

  OwnedString report;
  const auto status = rfts_run_test(method.c_str(), x.values.data(), x.rows,
                                    y.values.data(), y.rows, x.cols, opts.get(),
                                    &report.ptr);
  if (status != RFTS_OK) {
    std::cerr << "error: " << rfts_last_error() << "\n";
    return status_to_exit(status);
  }
  if (format == "csv") {
    const auto j = nlohmann::json::parse(report.str());
    const char* columns[] = {"test",    "statistic", "p_value", "null_mean",
                             "null_sd", "k",         "seed",    "runtime_ms"};
    std::string header, row;
    for (const char* col : columns) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += col;
      if (j.contains(col)) {
        const auto& v = j.at(col);
        row += v.is_string() ? v.get<std::string>() : v.dump();
      }
    }
    std::cout << header << "\n" << row << "\n";
  } else {
    std::cout << report.str() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rfts: random-forest two-sample tests and Monte-Carlo studies"};
  app.name("rfts");
  app.set_help_all_flag("--help-all", "Print help for every subcommand");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rfts_version()));

  // ---- test -------------------------------------------------------------
  auto* test = app.add_subcommand("test", "Run one two-sample test on two CSV files");
  std::string method, x_path, y_path, format = "json";
  double alpha = 0.05;
  int k = 100, b = 200, m_partitions = 2, jobs = 0;
  std::size_t n_train = 0;
  std::uint64_t seed = default_seed();
  ForestFlags test_forest;
  test->add_option("--method", method, "binomial | hoeffding | hyporf | ustat | mmdboot")
      ->required()
      ->check(CLI::IsMember({"binomial", "hoeffding", "hyporf", "ustat", "mmdboot"}));
  test->add_option("x", x_path, "CSV of sample X (rows = observations)")->required();
  test->add_option("y", y_path, "CSV of sample Y (rows = observations)")->required();
  test->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  test->add_option("--k", k, "Permutations (hyporf) or replicates (ustat)")
      ->capture_default_str();
  test->add_option("--b", b, "Permutations for mmdboot")->capture_default_str();
  test->add_option("--n-train", n_train, "Training rows for split tests (0 = half)")
      ->capture_default_str();
  test->add_option("--m-partitions", m_partitions, "Disjoint subsets per ustat replicate")
      ->capture_default_str();
  test_forest.attach(test);
  test->add_option("--seed", seed, "RNG seed (env RFTS_SEED)")->capture_default_str();
  test->add_option("--jobs", jobs, "Worker threads (0 = all cores, env RFTS_JOBS)")
      ->capture_default_str();
  test->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // ---- power-study --------------------------------------------------------
  auto* power = app.add_subcommand("power-study", "Monte-Carlo power study");
  std::string preset, config_path, scale = "desk", output;
  int s_runs = 0, n_per_class = 0, n_total = 0, study_jobs = 0;
  std::uint64_t study_seed = default_seed();
  bool list_presets = false;
  auto* preset_opt =
      power->add_option("--preset", preset, "Named scenario grid (see --list-presets)");
  auto* config_opt =
      power->add_option("--config", config_path, "Study spec JSON file");
  preset_opt->excludes(config_opt);
  power->add_flag("--list-presets", list_presets, "List preset names and exit");
  power->add_option("--scale", scale, "Preset scale: desk shrinks n, p, runs and forest size; full uses the reference settings")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  power->add_option("--s-runs", s_runs, "Monte-Carlo runs per grid point (0 = preset)")
      ->capture_default_str();
  auto* npc_opt = power->add_option("--n-per-class", n_per_class,
                                    "Observations per class (0 = preset)");
  auto* ntot_opt = power->add_option(
      "--n-total", n_total, "Total pooled observations, split evenly (0 = preset)");
  npc_opt->excludes(ntot_opt);
  power->add_option("--seed", study_seed, "Base seed (env RFTS_SEED)")
      ->capture_default_str();
  power->add_option("--jobs", study_jobs, "Worker threads (0 = all cores, env RFTS_JOBS)")
      ->capture_default_str();
  power->add_option("-o,--output", output, "Output CSV path");

  // ---- level-check --------------------------------------------------------
  auto* level = app.add_subcommand("level-check", "Realized level under H0");
  std::string dists = "all", level_tests = "binomial,hyporf,ustat,mmdboot";
  std::string level_output;
  int level_s = 200, level_n = 100, level_p = 20, level_k = 100, level_b = 200,
      level_ustat_k = 50, level_jobs = 0;
  std::uint64_t level_seed = default_seed();
  ForestFlags level_forest;
  level_forest.trees = 300;
  level->add_option("--dists", dists,
                    "'all' or a comma list of the 15 catalog distributions")
      ->capture_default_str();
  level->add_option("--tests", level_tests, "Comma list of tests to run")
      ->capture_default_str();
  level->add_option("--s-runs", level_s, "Runs per distribution")->capture_default_str();
  level->add_option("--n-per-class", level_n, "Observations per class")
      ->capture_default_str();
  level->add_option("--p", level_p, "Dimension")->capture_default_str();
  level->add_option("--k", level_k, "hypoRF permutations")->capture_default_str();
  level->add_option("--ustat-k", level_ustat_k, "ustat replicates")->capture_default_str();
  level->add_option("--b", level_b, "mmdboot permutations")->capture_default_str();
  level_forest.attach(level);
  level->add_option("--seed", level_seed, "Base seed (env RFTS_SEED)")
      ->capture_default_str();
  level->add_option("--jobs", level_jobs, "Worker threads (0 = all cores, env RFTS_JOBS)")
      ->capture_default_str();
  level->add_option("-o,--output", level_output, "Output CSV path")->required();

  // ---- var-check ----------------------------------------------------------
  auto* var = app.add_subcommand(
      "var-check", "Spread of the hypoRF permutation variance estimate vs K");
  std::string k_grid = "10,20,40,60,80,100,150,200,500,700,1000";
  std::string var_output;
  int var_s = 100, var_n = 50, var_p = 10, var_jobs = 0;
  std::uint64_t var_seed = default_seed();
  ForestFlags var_forest;
  var->add_option("--k-grid", k_grid, "Comma list of permutation counts")
      ->capture_default_str();
  var->add_option("--s-runs", var_s, "Repetitions per K")->capture_default_str();
  var->add_option("--n-per-class", var_n, "Observations per class")->capture_default_str();
  var->add_option("--p", var_p, "Dimension")->capture_default_str();
  var_forest.attach(var);
  var->add_option("--seed", var_seed, "Base seed (env RFTS_SEED)")->capture_default_str();
  var->add_option("--jobs", var_jobs, "Worker threads (0 = all cores, env RFTS_JOBS)")
      ->capture_default_str();
  var->add_option("-o,--output", var_output, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (test->parsed())
    return cmd_test(method, x_path, y_path, alpha, k, b, n_train, m_partitions,
                    test_forest, seed, jobs, format);

  if (power->parsed()) {
    if (list_presets) {
      OwnedString names;
      if (rfts_preset_names(&names.ptr) != RFTS_OK) {
        std::cerr << "error: " << rfts_last_error() << "\n";
        return kExitCompute;
      }
      std::cout << names.str();
      return kExitOk;
    }
    if (preset.empty() == config_path.empty()) {
      std::cerr << "error: provide exactly one of --preset or --config\n";
      return kExitUsage;
    }
    if (output.empty()) {
      std::cerr << "error: --output is required\n";
      return kExitUsage;
    }
    nlohmann::json spec;
    if (!preset.empty()) {
      OwnedString spec_str;
      if (rfts_preset_study(preset.c_str(), scale.c_str(), study_seed, &spec_str.ptr) !=
          RFTS_OK) {
        std::cerr << "error: " << rfts_last_error() << "\n";
        return kExitUsage;
      }
      spec = nlohmann::json::parse(spec_str.str());
    } else {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open " << config_path << "\n";
        return kExitUsage;
      }
      try {
        f >> spec;
      } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << config_path << " is not valid JSON: " << e.what()
                  << "\n";
        return kExitUsage;
      }
    }
    spec["base_seed"] = study_seed;
    if (s_runs > 0) spec["s_runs"] = s_runs;
    if (n_total > 0) {
      if (n_total % 2 != 0) {
        std::cerr << "error: --n-total must be even (it is split into two classes)\n";
        return kExitUsage;
      }
      n_per_class = n_total / 2;
    }
    if (n_per_class > 0 && spec.contains("scenarios"))
      for (auto& s : spec["scenarios"]) s["n_per_class"] = n_per_class;
    spec["jobs"] = study_jobs;
    return run_reported_study(spec.dump(), output);
  }

  if (level->parsed()) {
    nlohmann::json scenarios = nlohmann::json::array();
    std::vector<std::string> wanted;
    if (dists == "all") {
      wanted = {"rnorm", "rbinom", "rt",     "rpois",    "rf",       "runif",
                "rmvt",  "rexp",   "rbeta",  "mvrnorm",  "rlnorm",   "rtcopula",
                "rweibull", "rmixture", "cont_dist"};
    } else {
      std::stringstream ss(dists);
      std::string item;
      while (std::getline(ss, item, ',')) wanted.push_back(item);
    }
    for (const auto& d : wanted)
      scenarios.push_back({{"family", "level_check"},
                           {"level_dist", d},
                           {"p", level_p},
                           {"n_per_class", level_n}});
    nlohmann::json tests = nlohmann::json::array();
    std::stringstream ts(level_tests);
    std::string t;
    while (std::getline(ts, t, ',')) {
      nlohmann::json tj{{"method", t}, {"forest", level_forest.to_json()}};
      if (t == "hyporf") tj["k"] = level_k;
      if (t == "ustat") {
        tj["k"] = level_ustat_k;
        tj["m_partitions"] = 2;
      }
      if (t == "mmdboot") tj["b"] = level_b;
      tests.push_back(tj);
    }
    const nlohmann::json spec{{"kind", "level"},    {"scenarios", scenarios},
                              {"tests", tests},     {"s_runs", level_s},
                              {"base_seed", level_seed}, {"jobs", level_jobs}};
    return run_reported_study(spec.dump(), level_output);
  }

  if (var->parsed()) {
    std::vector<int> ks;
    std::stringstream ss(k_grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        ks.push_back(std::stoi(item));
      } catch (const std::exception&) {
        std::cerr << "error: --k-grid entry '" << item << "' is not an integer\n";
        return kExitUsage;
      }
    }
    const nlohmann::json spec{{"kind", "var_check"},
                              {"k_grid", ks},
                              {"s_runs", var_s},
                              {"n_per_class", var_n},
                              {"p", var_p},
                              {"forest", var_forest.to_json()},
                              {"base_seed", var_seed},
                              {"jobs", var_jobs}};
    return run_reported_study(spec.dump(), var_output);
  }

  return kExitUsage;
}
