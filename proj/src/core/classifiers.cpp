#include "core/classifiers.hpp"

#include <cmath>

namespace rfts::classifiers {

int TrainedClassifier::classify(std::span<const double> z) const {
  if (const auto* f = std::get_if<forest::Forest>(&model_))
    return forest::predict_vote(*f, z).label;
  return lda_classify(std::get<LdaModel>(model_), z);
}

TrainedClassifier train(const ClassifierSpec& spec, const LabeledDataset& data,
                        numkit::RngStream rng, int jobs) {
  TrainedClassifier clf;
  if (spec.kind == ClassifierSpec::Kind::RandomForest) {
    clf.model_ = forest::fit(data, spec.forest, rng, jobs);
    return clf;
  }
  if (!data.has_both_labels())
    throw std::invalid_argument("classifiers::train: training data contains a single class");
  const std::size_t p = data.dim();
  LdaModel m;
  m.mean0.assign(p, 0.0);
  m.mean1.assign(p, 0.0);
  std::size_t n0 = 0, n1 = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto& acc = data.labels[r] ? m.mean1 : m.mean0;
    (data.labels[r] ? n1 : n0) += 1;
    const auto row = data.features.row(r);
    for (std::size_t c = 0; c < p; ++c) acc[c] += row[c];
  }
  for (std::size_t c = 0; c < p; ++c) {
    m.mean0[c] /= static_cast<double>(n0);
    m.mean1[c] /= static_cast<double>(n1);
  }
  clf.model_ = std::move(m);
  return clf;
}

int lda_classify(const LdaModel& model, std::span<const double> z) {
  if (z.size() != model.mean0.size())
    throw std::invalid_argument("lda_classify: dimension mismatch");
  // compare squared distances to the two class means
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    const double a = z[c] - model.mean0[c];
    const double b = z[c] - model.mean1[c];
    d0 += a * a;
    d1 += b * b;
  }
  return d1 < d0 ? 1 : 0;
}

}  // namespace rfts::classifiers
