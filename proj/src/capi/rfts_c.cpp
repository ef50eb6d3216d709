// extern-C surface over the core library: opaque option handles, status
// codes, thread-local error messages, JSON in/out.
#include "rfts/rfts.h"

#include <cstring>
#include <string>

#include "core/format.hpp"
#include "core/harness.hpp"
#include "core/mmd.hpp"
#include "core/twosample.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rfts_status fail(rfts_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

template <class Fn>
rfts_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(RFTS_ERR_INVALID, e.what());
  } catch (const rfts::IoError& e) {
    return fail(RFTS_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(RFTS_ERR_COMPUTE, e.what());
  }
}

rfts::Matrix to_matrix(const double* data, std::size_t rows, std::size_t cols) {
  if (data == nullptr && rows * cols > 0)
    throw std::invalid_argument("null data pointer");
  return {rows, cols, std::vector<double>(data, data + rows * cols)};
}

}  // namespace

struct rfts_options {
  double alpha = 0.05;
  int k = 100;
  int b = 200;
  std::size_t n_train = 0;
  int m_partitions = 2;
  rfts::forest::ForestConfig forest;
  std::uint64_t seed = 1;
  int jobs = 0;
};

extern "C" {

const char* rfts_version(void) { return rfts::kVersion; }

const char* rfts_last_error(void) { return g_last_error.c_str(); }

void rfts_string_free(char* s) { std::free(s); }

rfts_options* rfts_options_new(void) { return new rfts_options(); }

void rfts_options_free(rfts_options* opts) { delete opts; }

static rfts_status options_set(rfts_options* opts, const char* key, double value) {
  if (opts == nullptr || key == nullptr)
    return fail(RFTS_ERR_INVALID, "rfts_options_set: null argument");
  const std::string k = key;
  if (k == "alpha")
    opts->alpha = value;
  else if (k == "k")
    opts->k = static_cast<int>(value);
  else if (k == "b")
    opts->b = static_cast<int>(value);
  else if (k == "n_train")
    opts->n_train = static_cast<std::size_t>(value);
  else if (k == "m_partitions")
    opts->m_partitions = static_cast<int>(value);
  else if (k == "trees")
    opts->forest.num_trees = static_cast<int>(value);
  else if (k == "min_node_size")
    opts->forest.min_node_size = static_cast<int>(value);
  else if (k == "mtry")
    opts->forest.mtry = static_cast<int>(value);
  else if (k == "max_depth")
    opts->forest.max_depth = static_cast<int>(value);
  else if (k == "bootstrap_fraction")
    opts->forest.bootstrap_fraction = value;
  else if (k == "jobs")
    opts->jobs = static_cast<int>(value);
  else if (k == "seed")
    opts->seed = static_cast<std::uint64_t>(value);
  else
    return fail(RFTS_ERR_INVALID, "rfts_options_set: unknown key '" + k + "'");
  return RFTS_OK;
}

rfts_status rfts_options_set_f64(rfts_options* opts, const char* key, double value) {
  return options_set(opts, key, value);
}

rfts_status rfts_options_set_u64(rfts_options* opts, const char* key, uint64_t value) {
  if (opts != nullptr && key != nullptr && std::string(key) == "seed") {
    opts->seed = value;  // exact, no double round-trip
    return RFTS_OK;
  }
  return options_set(opts, key, static_cast<double>(value));
}

rfts_status rfts_run_test(const char* method, const double* x, size_t x_rows,
                          const double* y, size_t y_rows, size_t cols,
                          const rfts_options* opts, char** report_json_out) {
  return guarded([&]() -> rfts_status {
    if (method == nullptr || report_json_out == nullptr)
      throw std::invalid_argument("rfts_run_test: null argument");
    const rfts_options defaults;
    const rfts_options& o = opts ? *opts : defaults;
    const auto mx = to_matrix(x, x_rows, cols);
    const auto my = to_matrix(y, y_rows, cols);
    const auto name = rfts::twosample::test_name_from_string(method);
    rfts::numkit::RngStream rng(o.seed);

    rfts::twosample::TestReport report;
    using rfts::twosample::TestName;
    const std::size_t total = x_rows + y_rows;
    auto plan = rfts::twosample::SplitPlan::half_split(total);
    if (o.n_train > 0) {
      if (o.n_train >= total)
        throw std::invalid_argument("rfts_run_test: n_train must be < total rows");
      plan = {o.n_train, total - o.n_train, {}};
    }
    switch (name) {
      case TestName::Binomial:
        report = rfts::twosample::binomial_test(
            mx, my, rfts::classifiers::ClassifierSpec::random_forest(o.forest), plan,
            rng, o.jobs);
        break;
      case TestName::Hoeffding:
        report = rfts::twosample::hoeffding_test(
            mx, my, rfts::classifiers::ClassifierSpec::random_forest(o.forest), plan,
            o.alpha, rng, o.jobs);
        break;
      case TestName::HypoRF:
        report = rfts::twosample::hyporf_test(mx, my, o.forest, o.k, rng, o.jobs);
        break;
      case TestName::UStat: {
        const std::size_t n_train = o.n_train > 0 ? o.n_train : total / 2;
        report = rfts::twosample::ustat_test(mx, my, o.forest, o.k, n_train,
                                             o.m_partitions, o.alpha, rng, o.jobs);
        break;
      }
      case TestName::MMDBoot:
        report = rfts::mmd::mmd_boot_test(mx, my, {}, o.b, rng, o.jobs);
        break;
    }
    *report_json_out = dup_string(report.to_json().dump(2));
    return RFTS_OK;
  });
}

rfts_status rfts_preset_study(const char* preset, const char* scale, uint64_t base_seed,
                              char** spec_json_out) {
  return guarded([&]() -> rfts_status {
    if (preset == nullptr || scale == nullptr || spec_json_out == nullptr)
      throw std::invalid_argument("rfts_preset_study: null argument");
    const auto spec = rfts::harness::preset_study(preset, scale, base_seed);
    auto j = spec.to_json();
    *spec_json_out = dup_string(j.dump(2));
    return RFTS_OK;
  });
}

rfts_status rfts_preset_names(char** names_out) {
  return guarded([&]() -> rfts_status {
    if (names_out == nullptr) throw std::invalid_argument("rfts_preset_names: null out");
    std::string all;
    for (const auto& n : rfts::harness::preset_names()) {
      all += n;
      all += '\n';
    }
    *names_out = dup_string(all);
    return RFTS_OK;
  });
}

static nlohmann::json result_to_json(const rfts::harness::StudyResult& res) {
  nlohmann::json rows = nlohmann::json::array();
  if (res.kind == rfts::harness::StudyKind::VarCheck) {
    for (const auto& r : res.var_rows)
      rows.push_back({{"K", r.k}, {"rep", r.rep}, {"sigma_sq", r.sigma_sq}});
  } else {
    for (const auto& r : res.rows)
      rows.push_back({{"scenario", r.scenario},
                      {"knob", r.knob},
                      {"p", r.p},
                      {"d", r.d},
                      {"n_per_class", r.n_per_class},
                      {"test", r.test},
                      {"S", r.s_runs},
                      {"rejections", r.rejections},
                      {"power", r.power()},
                      {"failures", r.failures},
                      {"mean_runtime_ms", r.mean_runtime_ms}});
  }
  return {{"kind", rfts::harness::study_kind_name(res.kind)}, {"rows", rows}};
}

rfts_status rfts_run_study(const char* spec_json, const char* output_csv_path,
                           rfts_progress_fn progress, void* user,
                           char** summary_json_out) {
  return guarded([&]() -> rfts_status {
    if (spec_json == nullptr || output_csv_path == nullptr)
      throw std::invalid_argument("rfts_run_study: null argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(spec_json);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("rfts_run_study: spec is not valid JSON: ") +
                                  e.what());
    }
    rfts::harness::StudySpec spec;
    try {
      spec = rfts::harness::StudySpec::from_json(j);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("rfts_run_study: bad spec: ") + e.what());
    }
    rfts::harness::ProgressFn cb;
    if (progress)
      cb = [progress, user](const std::string& line) { progress(line.c_str(), user); };
    const auto res = rfts::harness::run_study(spec, output_csv_path, cb);
    if (summary_json_out) *summary_json_out = dup_string(result_to_json(res).dump(2));
    if (res.partial_failure())
      return fail(RFTS_ERR_PARTIAL,
                  "study completed with a grid point exceeding 10% failed runs");
    return RFTS_OK;
  });
}

rfts_status rfts_load_study(const char* csv_path, char** result_json_out) {
  return guarded([&]() -> rfts_status {
    if (csv_path == nullptr || result_json_out == nullptr)
      throw std::invalid_argument("rfts_load_study: null argument");
    const auto res = rfts::harness::load(csv_path);
    *result_json_out = dup_string(result_to_json(res).dump(2));
    return RFTS_OK;
  });
}

}  // extern "C"
