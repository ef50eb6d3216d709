#include "core/common.hpp"

#include <cmath>

namespace rfts {

bool Matrix::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool LabeledDataset::has_both_labels() const {
  bool seen0 = false, seen1 = false;
  for (auto l : labels) (l ? seen1 : seen0) = true;
  return seen0 && seen1;
}

LabeledDataset pool_samples(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("pool_samples: column counts differ (" +
                                std::to_string(x.cols()) + " vs " +
                                std::to_string(y.cols()) + ")");
  LabeledDataset d;
  d.features = Matrix(x.rows() + y.rows(), x.cols());
  d.labels.resize(x.rows() + y.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto dst = d.features.row(r);
    auto src = x.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    d.labels[r] = 1;
  }
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto dst = d.features.row(x.rows() + r);
    auto src = y.row(r);
    std::copy(src.begin(), src.end(), dst.begin());
    d.labels[x.rows() + r] = 0;
  }
  return d;
}

LabeledDataset subset_rows(const LabeledDataset& data, std::span<const std::size_t> idx) {
  LabeledDataset out;
  out.features = Matrix(idx.size(), data.dim());
  out.labels.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = data.features.row(idx[i]);
    auto dst = out.features.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    out.labels[i] = data.labels[idx[i]];
  }
  return out;
}

}  // namespace rfts
