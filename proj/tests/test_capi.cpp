// Exercises the shared-library surface the way an external consumer would:
// only rfts/rfts.h plus JSON parsing of the returned strings.
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfts/rfts.h"

namespace {

struct Str {
  char* ptr = nullptr;
  ~Str() { rfts_string_free(ptr); }
  std::string get() const { return ptr ? std::string(ptr) : std::string(); }
};

struct Opts {
  rfts_options* o = rfts_options_new();
  ~Opts() { rfts_options_free(o); }
};

// deterministic pseudo-gaussian-ish data without pulling in core headers
std::vector<double> make_data(std::size_t rows, std::size_t cols, unsigned seed,
                              double shift = 0.0) {
  std::vector<double> v(rows * cols);
  unsigned state = seed * 2654435761u + 1u;
  for (auto& x : v) {
    double acc = 0.0;
    for (int i = 0; i < 12; ++i) {
      state = state * 1664525u + 1013904223u;
      acc += static_cast<double>(state >> 8) / 16777216.0;
    }
    x = acc - 6.0 + shift;  // Irwin-Hall 12 is close to standard normal
  }
  return v;
}

}  // namespace

TEST_CASE("version and error strings") {
  CHECK(std::string(rfts_version()) == "0.1.0");
  CHECK(rfts_last_error() != nullptr);
}

TEST_CASE("options: typed setters and unknown keys") {
  Opts opts;
  CHECK(rfts_options_set_f64(opts.o, "alpha", 0.1) == RFTS_OK);
  CHECK(rfts_options_set_u64(opts.o, "seed", 123456789012345ull) == RFTS_OK);
  CHECK(rfts_options_set_f64(opts.o, "trees", 50) == RFTS_OK);
  CHECK(rfts_options_set_f64(opts.o, "no_such_key", 1.0) == RFTS_ERR_INVALID);
  CHECK(std::string(rfts_last_error()).find("no_such_key") != std::string::npos);
  CHECK(rfts_options_set_f64(nullptr, "alpha", 0.1) == RFTS_ERR_INVALID);
}

TEST_CASE("run_test: binomial report over the C surface") {
  const auto x = make_data(40, 3, 1);
  const auto y = make_data(40, 3, 2, 4.0);
  Opts opts;
  rfts_options_set_f64(opts.o, "trees", 50);
  rfts_options_set_u64(opts.o, "seed", 7);
  Str report;
  REQUIRE(rfts_run_test("binomial", x.data(), 40, y.data(), 40, 3, opts.o,
                        &report.ptr) == RFTS_OK);
  const auto j = nlohmann::json::parse(report.get());
  CHECK(j.at("test") == "binomial");
  CHECK(j.at("p_value").get<double>() < 0.01);  // 4-sigma shift
  CHECK(j.at("seed") == 7);

  // defaults apply when opts is null
  Str report2;
  CHECK(rfts_run_test("mmdboot", x.data(), 40, y.data(), 40, 3, nullptr,
                      &report2.ptr) == RFTS_OK);
  CHECK(nlohmann::json::parse(report2.get()).at("k") == 200);
}

TEST_CASE("run_test: invalid arguments map to status codes") {
  const auto x = make_data(10, 2, 3);
  Str out;
  CHECK(rfts_run_test("anova", x.data(), 10, x.data(), 10, 2, nullptr, &out.ptr) ==
        RFTS_ERR_INVALID);
  CHECK(std::string(rfts_last_error()).find("anova") != std::string::npos);
  CHECK(rfts_run_test("binomial", nullptr, 10, x.data(), 10, 2, nullptr, &out.ptr) ==
        RFTS_ERR_INVALID);
  // one observation per class cannot support the ustat partitions
  CHECK(rfts_run_test("ustat", x.data(), 1, x.data(), 1, 2, nullptr, &out.ptr) ==
        RFTS_ERR_COMPUTE);
}

TEST_CASE("run_test: identical samples do not reject under hyporf") {
  const auto x = make_data(30, 2, 5);
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Opts opts;
    rfts_options_set_f64(opts.o, "k", 40);
    rfts_options_set_f64(opts.o, "trees", 60);
    rfts_options_set_u64(opts.o, "seed", seed);
    Str report;
    REQUIRE(rfts_run_test("hyporf", x.data(), 30, x.data(), 30, 2, opts.o,
                          &report.ptr) == RFTS_OK);
    CHECK(nlohmann::json::parse(report.get()).at("p_value").get<double>() > 0.01);
  }
}

TEST_CASE("presets and studies over the C surface") {
  Str names;
  REQUIRE(rfts_preset_names(&names.ptr) == RFTS_OK);
  CHECK(names.get().find("meanshift-sparse") != std::string::npos);
  CHECK(names.get().find("blob-table1") != std::string::npos);

  Str spec;
  REQUIRE(rfts_preset_study("meanshift-sparse", "desk", 9, &spec.ptr) == RFTS_OK);
  const auto sj = nlohmann::json::parse(spec.get());
  CHECK(sj.at("kind") == "power");
  CHECK(sj.at("base_seed") == 9);
  Str bad;
  CHECK(rfts_preset_study("nope", "desk", 1, &bad.ptr) == RFTS_ERR_INVALID);
  CHECK(rfts_preset_study("level-all", "cosmic", 1, &bad.ptr) == RFTS_ERR_INVALID);

  // a tiny study end to end, with a progress callback
  const nlohmann::json tiny{
      {"kind", "power"},
      {"s_runs", 4},
      {"base_seed", 3},
      {"jobs", 2},
      {"scenarios",
       {{{"family", "mean_shift"}, {"p", 2}, {"d", 2}, {"knob", 5.0}, {"n_per_class", 15}}}},
      {"tests",
       {{{"method", "binomial"},
         {"forest", {{"num_trees", 20}, {"min_node_size", 4}}}}}}};
  const auto csv_path =
      (std::filesystem::temp_directory_path() / "rfts_capi_study.csv").string();
  std::filesystem::remove(csv_path);
  std::filesystem::remove(csv_path + ".meta.json");
  int progress_lines = 0;
  Str summary;
  const auto status = rfts_run_study(
      tiny.dump().c_str(), csv_path.c_str(),
      [](const char*, void* user) { ++*static_cast<int*>(user); }, &progress_lines,
      &summary.ptr);
  REQUIRE(status == RFTS_OK);
  CHECK(progress_lines > 0);
  const auto rows = nlohmann::json::parse(summary.get()).at("rows");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("S") == 4);
  CHECK(rows[0].at("rejections").get<int>() >= 3);  // 5/sqrt(2) shift per coordinate

  Str loaded;
  REQUIRE(rfts_load_study(csv_path.c_str(), &loaded.ptr) == RFTS_OK);
  CHECK(nlohmann::json::parse(loaded.get()).at("rows").size() == 1);

  CHECK(rfts_run_study("{not json", csv_path.c_str(), nullptr, nullptr, nullptr) ==
        RFTS_ERR_INVALID);
  CHECK(rfts_load_study("/no/such/file.csv", &loaded.ptr) == RFTS_ERR_IO);
  std::filesystem::remove(csv_path);
  std::filesystem::remove(csv_path + ".meta.json");
}
