#pragma once

#include "gssl/dataset.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace gssl {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Edge {
  Index u;
  Index v;
  double weight;
};

/// Pairwise constraints between labeled samples.
struct GraphConstraints {
  std::vector<std::pair<Index, Index>> must_link;
  std::vector<std::pair<Index, Index>> cannot_link;
};

/// Must-link for every same-class labeled pair, cannot-link for every cross-class pair.
GraphConstraints constraints_from_labels(const Dataset& data);

/// Undirected weighted graph with zero diagonal and no isolated nodes.
///
/// The weight matrix is stored with both triangles written from the same value,
/// so W == W^T holds bit for bit. Degrees and volume are cached at construction.
/// Instances are immutable.
class Graph {
 public:
  /// Validates symmetry, nonnegativity, the zero diagonal and positive degrees.
  explicit Graph(SparseMatrix weights);

  /// Builds from an undirected edge list. Repeated pairs keep the last weight;
  /// zero-weight edges are dropped.
  static Graph from_edges(Index n, std::span<const Edge> edges);
  static Graph from_edges(Index n, std::initializer_list<Edge> edges);
  static Graph from_dense(const Matrix& weights);

  Index size() const { return weights_.rows(); }
  const SparseMatrix& weights() const { return weights_; }
  const Vector& degrees() const { return degrees_; }
  double volume() const { return volume_; }
  double weight(Index i, Index j) const { return weights_.coeff(i, j); }
  std::vector<Index> neighbors(Index i) const;

  /// Connected-component id per node, ids numbered by smallest member.
  const std::vector<Index>& components() const { return components_; }
  Index num_components() const { return num_components_; }

 private:
  SparseMatrix weights_;
  Vector degrees_;
  double volume_ = 0.0;
  std::vector<Index> components_;
  Index num_components_ = 0;
};

/// Mean distance from each row to its k-th nearest other row.
double auto_sigma(const Matrix& features, Index k);

/// Symmetrized k-NN graph with Gaussian weights exp(-|xi-xj|^2 / 2 sigma^2).
///
/// An edge exists when either endpoint is among the other's k nearest neighbours.
/// With no sigma the local-scale heuristic auto_sigma is used. Constraints are
/// applied after thresholding: must-link pairs get weight 1 (added if absent),
/// cannot-link pairs are removed.
Graph build_knn_graph(const Matrix& features, Index k, std::optional<double> sigma = std::nullopt,
                      const std::optional<GraphConstraints>& constraints = std::nullopt);
Graph build_knn_graph(const Dataset& data, Index k, std::optional<double> sigma = std::nullopt,
                      const std::optional<GraphConstraints>& constraints = std::nullopt);

/// Copy of g with must-link weights set to 1 and cannot-link edges removed.
Graph apply_constraints(const Graph& g, const GraphConstraints& constraints);

/// L = D - W.
SparseMatrix laplacian(const Graph& g);

/// S = D^{-1/2} W D^{-1/2}.
SparseMatrix normalized_smoother(const Graph& g);

/// P = D^{-1} W, row-stochastic.
SparseMatrix random_walk_matrix(const Graph& g);

/// Commute times of the natural random walk from the Laplacian pseudoinverse.
///
/// Construction costs one dense symmetric eigendecomposition; queries are O(1).
/// Eigenvalues below 1e-10 * lambda_max are treated as zero. Each pair uses the
/// volume of its own connected component.
class CommuteTimes {
 public:
  explicit CommuteTimes(const Graph& g);

  double operator()(Index i, Index j) const;
  /// Mean commute time from i to the members of set.
  double to_set(Index i, std::span<const Index> set) const;

  const Matrix& pseudoinverse() const { return pinv_; }
  Index component(Index i) const { return components_.at(static_cast<std::size_t>(i)); }

 private:
  Matrix pinv_;
  std::vector<Index> components_;
  std::vector<double> component_volume_;
};

double commute_time(const Graph& g, Index i, Index j);
double commute_time_to_set(const Graph& g, Index i, std::span<const Index> set);

}  // namespace gssl
