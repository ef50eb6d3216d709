#include <doctest.h>

#include <cmath>

#include "core/classifiers.hpp"
#include "core/special.hpp"
#include "oracles.hpp"

using namespace rfts;
using namespace rfts::classifiers;

namespace {

LabeledDataset two_gaussians_1d(double mu0, double mu1, int n, std::uint64_t seed) {
  numkit::RngStream rng(seed, 1);
  Matrix x(n, 1), y(n, 1);  // X rows get label 1, Y rows label 0
  for (double& v : x.data()) v = mu1 + rng.gaussian();
  for (double& v : y.data()) v = mu0 + rng.gaussian();
  return pool_samples(x, y);
}

}  // namespace

TEST_CASE("lda_classify: nearest mean, boundary tie, hand example") {
  LdaModel m;
  m.mean0 = {0.0};
  m.mean1 = {2.0};
  CHECK(lda_classify(m, std::vector<double>{0.0}) == 0);   // exactly mu0
  CHECK(lda_classify(m, std::vector<double>{1.0}) == 0);   // equidistant -> label 0
  CHECK(lda_classify(m, std::vector<double>{1.5}) == 1);   // nearest-mean oracle
  CHECK(lda_classify(m, std::vector<double>{2.0}) == 1);
  CHECK_THROWS_AS(lda_classify(m, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("lda decision regions are half-spaces") {
  numkit::RngStream rng(5, 5);
  LdaModel m;
  m.mean0 = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
  m.mean1 = {rng.gaussian(), rng.gaussian(), rng.gaussian()};
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> a{rng.gaussian() * 3, rng.gaussian() * 3, rng.gaussian() * 3};
    std::vector<double> b{rng.gaussian() * 3, rng.gaussian() * 3, rng.gaussian() * 3};
    if (lda_classify(m, a) == lda_classify(m, b)) continue;
    // the segment between differently-classified points crosses the
    // separating hyperplane w.(z - mid) = 0 exactly once
    double wa = 0, wb = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const double w = m.mean0[c] - m.mean1[c];
      const double mid = 0.5 * (m.mean0[c] + m.mean1[c]);
      wa += w * (a[c] - mid);
      wb += w * (b[c] - mid);
    }
    CHECK(wa * wb < 0.0);
  }
}

TEST_CASE("train dispatches to LDA and forest") {
  const auto data = two_gaussians_1d(0.0, 10.0, 200, 3);
  const auto lda = train(ClassifierSpec::lda(), data, numkit::RngStream(1), 1);
  CHECK_FALSE(lda.supports_oob());
  // holdout error bounded by Phi(-5) for means 10 sigma apart (plus slack)
  numkit::RngStream rng(7, 2);
  std::size_t wrong = 0;
  const int holdout = 2000;
  for (int i = 0; i < holdout; ++i) {
    const double z1 = 10.0 + rng.gaussian();
    const double z0 = rng.gaussian();
    wrong += lda.classify(std::vector<double>{z1}) != 1;
    wrong += lda.classify(std::vector<double>{z0}) != 0;
  }
  CHECK(static_cast<double>(wrong) / (2 * holdout) <= 0.01);

  // RF spec reproduces forest::fit exactly
  forest::ForestConfig cfg;
  cfg.num_trees = 30;
  const auto via_spec =
      train(ClassifierSpec::random_forest(cfg), data, numkit::RngStream(4, 4), 1);
  const auto direct = forest::fit(data, cfg, numkit::RngStream(4, 4), 1);
  CHECK(via_spec.supports_oob());
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> z{-3.0 + 0.3 * i};
    CHECK(via_spec.classify(z) == forest::predict_vote(direct, z).label);
  }
}

TEST_CASE("degenerate LDA: identical means still classifies totally") {
  Matrix x(3, 2), y(3, 2);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) x.at(r, c) = y.at(r, c) = double(r + c);
  const auto data = pool_samples(x, y);
  const auto clf = train(ClassifierSpec::lda(), data, numkit::RngStream(1), 1);
  for (double v : {-5.0, 0.0, 17.0})
    CHECK(clf.classify(std::vector<double>{v, v}) == 0);
}

TEST_CASE("under H0 the LDA holdout error averages one half") {
  numkit::RngStream rng(11, 0);
  std::vector<double> errors;
  for (int rep = 0; rep < 200; ++rep) {
    Matrix x(40, 3), y(40, 3);
    for (double& v : x.data()) v = rng.gaussian();
    for (double& v : y.data()) v = rng.gaussian();
    const auto data = pool_samples(x, y);
    const auto clf = train(ClassifierSpec::lda(), data, rng.split(rep), 1);
    std::size_t wrong = 0;
    const int m = 100;
    for (int i = 0; i < m; ++i) {
      std::vector<double> z{rng.gaussian(), rng.gaussian(), rng.gaussian()};
      const int label = static_cast<int>(rng.below(2));
      wrong += clf.classify(z) != label;
    }
    errors.push_back(static_cast<double>(wrong) / m);
  }
  CHECK(std::fabs(oracle::mean(errors) - 0.5) <= 0.02);
}

TEST_CASE("train rejects single-class data") {
  Matrix x(3, 1), y(3, 1);
  auto data = pool_samples(x, y);
  for (auto& l : data.labels) l = 0;
  CHECK_THROWS_AS(train(ClassifierSpec::lda(), data, numkit::RngStream(1), 1),
                  std::invalid_argument);
}
