#include "gssl/dataset.hpp"

#include "gssl/error.hpp"

#include <string>

namespace gssl {

Dataset::Dataset(Matrix features, std::vector<Label> labels, int num_classes,
                 std::vector<int> truth)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      truth_(std::move(truth)) {
  if (features_.rows() < 1 || features_.cols() < 1)
    throw InvalidParameter("dataset needs at least one sample and one feature");
  if (num_classes_ < 2) throw InvalidParameter("dataset needs at least two classes");
  if (static_cast<Index>(labels_.size()) != features_.rows())
    throw InvalidParameter("label count " + std::to_string(labels_.size()) +
                           " does not match sample count " +
                           std::to_string(features_.rows()));
  if (!truth_.empty() && static_cast<Index>(truth_.size()) != features_.rows())
    throw InvalidParameter("ground-truth length does not match sample count");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] && (*labels_[i] < 0 || *labels_[i] >= num_classes_))
      throw InvalidParameter("sample " + std::to_string(i) + " has class " +
                             std::to_string(*labels_[i]) + " outside [0, " +
                             std::to_string(num_classes_) + ")");
  }
  if (!features_.allFinite()) throw InvalidParameter("features must be finite");
}

std::vector<Index> Dataset::labeled_indices() const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (is_labeled(i)) out.push_back(i);
  return out;
}

std::vector<Index> Dataset::unlabeled_indices() const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i)
    if (!is_labeled(i)) out.push_back(i);
  return out;
}

std::vector<std::vector<Index>> Dataset::class_sets() const {
  std::vector<std::vector<Index>> sets(static_cast<std::size_t>(num_classes_));
  for (Index i = 0; i < size(); ++i)
    if (auto l = labels_[static_cast<std::size_t>(i)]) sets[static_cast<std::size_t>(*l)].push_back(i);
  return sets;
}

void Dataset::require_labels() const {
  for (const auto& l : labels_)
    if (l) return;
  throw InvalidParameter("at least one labeled sample is required");
}

Dataset Dataset::with_labels(std::vector<Label> labels) const {
  return Dataset(features_, std::move(labels), num_classes_, truth_);
}

LabelMatrix one_hot_seeds(const Dataset& data) {
  LabelMatrix y = LabelMatrix::Zero(data.size(), data.num_classes());
  for (Index i = 0; i < data.size(); ++i)
    if (auto l = data.labels()[static_cast<std::size_t>(i)]) y(i, *l) = 1.0;
  return y;
}

LabelMatrix signed_seeds(const Dataset& data) {
  LabelMatrix y = LabelMatrix::Zero(data.size(), data.num_classes());
  for (Index i = 0; i < data.size(); ++i) {
    if (auto l = data.labels()[static_cast<std::size_t>(i)]) {
      y.row(i).setConstant(-1.0);
      y(i, *l) = 1.0;
    }
  }
  return y;
}

std::vector<int> row_argmax(const LabelMatrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Index i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = static_cast<int>(c);
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace gssl
