#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace gssl {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x c matrix of soft scores or seed indicators, one column per class.
using LabelMatrix = Eigen::MatrixXd;

/// Class index of a sample, or std::nullopt when the sample is unlabeled.
using Label = std::optional<int>;

/// Feature matrix (one sample per row) with a per-sample label slot.
///
/// An optional ground-truth vector can ride along for scoring; algorithms never
/// read it.
class Dataset {
 public:
  Dataset(Matrix features, std::vector<Label> labels, int num_classes,
          std::vector<int> truth = {});

  const Matrix& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<int>& truth() const { return truth_; }
  bool has_truth() const { return !truth_.empty(); }

  Index size() const { return features_.rows(); }
  Index dim() const { return features_.cols(); }
  int num_classes() const { return num_classes_; }

  bool is_labeled(Index i) const { return labels_[static_cast<std::size_t>(i)].has_value(); }
  std::vector<Index> labeled_indices() const;
  std::vector<Index> unlabeled_indices() const;
  /// Labeled node indices grouped by class; entry c lists the samples labeled c.
  std::vector<std::vector<Index>> class_sets() const;

  /// Throws InvalidParameter when no sample carries a label.
  void require_labels() const;

  Dataset with_labels(std::vector<Label> labels) const;

 private:
  Matrix features_;
  std::vector<Label> labels_;
  int num_classes_;
  std::vector<int> truth_;
};

/// One-hot rows for labeled samples, zero rows for unlabeled ones.
LabelMatrix one_hot_seeds(const Dataset& data);

/// +1 in the sample's class column, -1 in every other column, 0 rows for unlabeled.
LabelMatrix signed_seeds(const Dataset& data);

/// Per-row argmax; ties go to the lowest class index.
std::vector<int> row_argmax(const LabelMatrix& scores);

}  // namespace gssl
