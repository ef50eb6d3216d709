// Classifier plug-in contract for the two-sample tests, plus the
// identity-covariance LDA (nearest estimated mean) classifier.
#pragma once

#include <functional>
#include <memory>
#include <variant>

#include "core/common.hpp"
#include "core/forest.hpp"

namespace rfts::classifiers {

struct LdaModel {
  std::vector<double> mean0;
  std::vector<double> mean1;
};

struct ClassifierSpec {
  // forest config is ignored for LDA
  enum class Kind { RandomForest, LdaIdentityCov } kind = Kind::RandomForest;
  forest::ForestConfig forest;

  static ClassifierSpec random_forest(const forest::ForestConfig& cfg) {
    return {Kind::RandomForest, cfg};
  }
  static ClassifierSpec lda() { return {Kind::LdaIdentityCov, {}}; }
};

class TrainedClassifier {
 public:
  int classify(std::span<const double> z) const;
  bool supports_oob() const { return std::holds_alternative<forest::Forest>(model_); }
  const forest::Forest& forest_model() const { return std::get<forest::Forest>(model_); }
  const LdaModel& lda_model() const { return std::get<LdaModel>(model_); }

 private:
  friend TrainedClassifier train(const ClassifierSpec&, const LabeledDataset&,
                                 numkit::RngStream, int);
  std::variant<forest::Forest, LdaModel> model_;
};

TrainedClassifier train(const ClassifierSpec& spec, const LabeledDataset& data,
                        numkit::RngStream rng, int jobs = 1);

// Nearest-estimated-mean rule under identity covariance; exact ties
// (including the degenerate equal-means model) go to label 0.
int lda_classify(const LdaModel& model, std::span<const double> z);

}  // namespace rfts::classifiers
