#include "gssl/graph.hpp"

#include "gssl/error.hpp"
#include "parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <string>

namespace gssl {
namespace {

using PairKey = std::pair<Index, Index>;

PairKey ordered(Index a, Index b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }

SparseMatrix symmetric_from_map(Index n, const std::map<PairKey, double>& edges) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 2);
  for (const auto& [key, w] : edges) {
    if (w == 0.0) continue;
    trips.emplace_back(key.first, key.second, w);
    trips.emplace_back(key.second, key.first, w);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

std::map<PairKey, double> to_edge_map(const SparseMatrix& w) {
  std::map<PairKey, double> edges;
  for (Index col = 0; col < w.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(w, col); it; ++it)
      if (it.row() < it.col()) edges[{it.row(), it.col()}] = it.value();
  return edges;
}

void check_pair(Index n, Index u, Index v, const char* kind) {
  if (u < 0 || v < 0 || u >= n || v >= n || u == v)
    throw InvalidParameter(std::string(kind) + " pair (" + std::to_string(u) + ", " +
                           std::to_string(v) + ") is not a valid node pair");
}

}  // namespace

GraphConstraints constraints_from_labels(const Dataset& data) {
  GraphConstraints out;
  const auto labeled = data.labeled_indices();
  for (std::size_t a = 0; a < labeled.size(); ++a) {
    for (std::size_t b = a + 1; b < labeled.size(); ++b) {
      const Index i = labeled[a];
      const Index j = labeled[b];
      if (data.labels()[static_cast<std::size_t>(i)] == data.labels()[static_cast<std::size_t>(j)])
        out.must_link.emplace_back(i, j);
      else
        out.cannot_link.emplace_back(i, j);
    }
  }
  return out;
}

Graph::Graph(SparseMatrix weights) : weights_(std::move(weights)) {
  const Index n = weights_.rows();
  if (n < 1 || weights_.cols() != n) throw GraphError("weight matrix must be square and nonempty");
  weights_.prune(0.0);
  weights_.makeCompressed();
  for (Index col = 0; col < n; ++col) {
    for (SparseMatrix::InnerIterator it(weights_, col); it; ++it) {
      if (!std::isfinite(it.value()) || it.value() < 0.0)
        throw GraphError("edge (" + std::to_string(it.row()) + ", " + std::to_string(col) +
                         ") has a negative or non-finite weight");
      if (it.row() == col)
        throw GraphError("self-loop on node " + std::to_string(col));
    }
  }
  SparseMatrix transposed = weights_.transpose();
  if ((SparseMatrix(weights_ - transposed)).norm() != 0.0)
    throw GraphError("weight matrix is not symmetric");

  degrees_ = Vector::Zero(n);
  for (Index col = 0; col < n; ++col)
    for (SparseMatrix::InnerIterator it(weights_, col); it; ++it) degrees_[col] += it.value();
  for (Index i = 0; i < n; ++i)
    if (!(degrees_[i] > 0.0)) throw GraphError("node " + std::to_string(i) + " is isolated");
  volume_ = degrees_.sum();

  components_.assign(static_cast<std::size_t>(n), -1);
  for (Index start = 0; start < n; ++start) {
    if (components_[static_cast<std::size_t>(start)] >= 0) continue;
    std::queue<Index> frontier;
    frontier.push(start);
    components_[static_cast<std::size_t>(start)] = num_components_;
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (SparseMatrix::InnerIterator it(weights_, u); it; ++it) {
        auto& c = components_[static_cast<std::size_t>(it.row())];
        if (c < 0) {
          c = num_components_;
          frontier.push(it.row());
        }
      }
    }
    ++num_components_;
  }
}

Graph Graph::from_edges(Index n, std::span<const Edge> edges) {
  std::map<PairKey, double> m;
  for (const auto& e : edges) {
    check_pair(n, e.u, e.v, "edge");
    m[ordered(e.u, e.v)] = e.weight;
  }
  return Graph(symmetric_from_map(n, m));
}

Graph Graph::from_edges(Index n, std::initializer_list<Edge> edges) {
  return from_edges(n, std::span<const Edge>(edges.begin(), edges.size()));
}

Graph Graph::from_dense(const Matrix& weights) {
  return Graph(SparseMatrix(weights.sparseView()));
}

std::vector<Index> Graph::neighbors(Index i) const {
  std::vector<Index> out;
  for (SparseMatrix::InnerIterator it(weights_, i); it; ++it) out.push_back(it.row());
  return out;
}

namespace {

// Indices of the k nearest other rows, ordered by (distance, index), with squared distances.
std::vector<std::pair<double, Index>> nearest_rows(const Matrix& x, Index i, Index k) {
  std::vector<std::pair<double, Index>> cand;
  cand.reserve(static_cast<std::size_t>(x.rows() - 1));
  for (Index j = 0; j < x.rows(); ++j)
    if (j != i) cand.emplace_back((x.row(i) - x.row(j)).squaredNorm(), j);
  std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
  cand.resize(static_cast<std::size_t>(k));
  return cand;
}

std::vector<std::vector<std::pair<double, Index>>> knn_table(const Matrix& x, Index k) {
  const Index n = x.rows();
  if (k < 1 || k >= n)
    throw InvalidParameter("k = " + std::to_string(k) + " must satisfy 1 <= k < n = " +
                           std::to_string(n));
  std::vector<std::vector<std::pair<double, Index>>> table(static_cast<std::size_t>(n));
  detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    table[i] = nearest_rows(x, static_cast<Index>(i), k);
  });
  return table;
}

double mean_kth_distance(const std::vector<std::vector<std::pair<double, Index>>>& table) {
  double sum = 0.0;
  for (const auto& row : table) sum += std::sqrt(row.back().first);
  return sum / static_cast<double>(table.size());
}

}  // namespace

double auto_sigma(const Matrix& features, Index k) {
  const double s = mean_kth_distance(knn_table(features, k));
  if (!(s > 0.0))
    throw InvalidParameter("automatic sigma is zero: every point coincides with its k-th neighbour");
  return s;
}

Graph build_knn_graph(const Matrix& features, Index k, std::optional<double> sigma,
                      const std::optional<GraphConstraints>& constraints) {
  const auto table = knn_table(features, k);
  double s = 0.0;
  if (sigma) {
    if (!(*sigma > 0.0)) throw InvalidParameter("sigma must be positive");
    s = *sigma;
  } else {
    s = mean_kth_distance(table);
    if (!(s > 0.0))
      throw InvalidParameter("automatic sigma is zero: every point coincides with its k-th neighbour");
  }
  const double inv_two_s2 = 1.0 / (2.0 * s * s);
  std::map<PairKey, double> edges;
  for (std::size_t i = 0; i < table.size(); ++i)
    for (const auto& [d2, j] : table[i])
      edges[ordered(static_cast<Index>(i), j)] = std::exp(-d2 * inv_two_s2);

  if (constraints) {
    const Index n = features.rows();
    for (const auto& [u, v] : constraints->must_link) check_pair(n, u, v, "must-link");
    for (const auto& [u, v] : constraints->cannot_link) check_pair(n, u, v, "cannot-link");
    for (const auto& [u, v] : constraints->must_link) edges[ordered(u, v)] = 1.0;
    for (const auto& [u, v] : constraints->cannot_link) edges.erase(ordered(u, v));
  }
  return Graph(symmetric_from_map(features.rows(), edges));
}

Graph build_knn_graph(const Dataset& data, Index k, std::optional<double> sigma,
                      const std::optional<GraphConstraints>& constraints) {
  if (constraints) {
    auto all_labeled = [&](const std::vector<std::pair<Index, Index>>& pairs) {
      for (const auto& [u, v] : pairs) {
        if (u < 0 || v < 0 || u >= data.size() || v >= data.size() || !data.is_labeled(u) ||
            !data.is_labeled(v))
          throw InvalidParameter("constraint pair (" + std::to_string(u) + ", " +
                                 std::to_string(v) + ") involves an unlabeled sample");
      }
    };
    all_labeled(constraints->must_link);
    all_labeled(constraints->cannot_link);
  }
  return build_knn_graph(data.features(), k, sigma, constraints);
}

Graph apply_constraints(const Graph& g, const GraphConstraints& constraints) {
  auto edges = to_edge_map(g.weights());
  for (const auto& [u, v] : constraints.must_link) check_pair(g.size(), u, v, "must-link");
  for (const auto& [u, v] : constraints.cannot_link) check_pair(g.size(), u, v, "cannot-link");
  for (const auto& [u, v] : constraints.must_link) edges[ordered(u, v)] = 1.0;
  for (const auto& [u, v] : constraints.cannot_link) edges.erase(ordered(u, v));
  return Graph(symmetric_from_map(g.size(), edges));
}

SparseMatrix laplacian(const Graph& g) {
  SparseMatrix d(g.size(), g.size());
  d.reserve(Eigen::VectorXi::Constant(g.size(), 1));
  for (Index i = 0; i < g.size(); ++i) d.insert(i, i) = g.degrees()[i];
  SparseMatrix l = d - g.weights();
  l.makeCompressed();
  return l;
}

SparseMatrix normalized_smoother(const Graph& g) {
  const Vector inv_sqrt = g.degrees().cwiseSqrt().cwiseInverse();
  SparseMatrix s = inv_sqrt.asDiagonal() * g.weights() * inv_sqrt.asDiagonal();
  s.makeCompressed();
  return s;
}

SparseMatrix random_walk_matrix(const Graph& g) {
  SparseMatrix p = g.degrees().cwiseInverse().asDiagonal() * g.weights();
  p.makeCompressed();
  return p;
}

CommuteTimes::CommuteTimes(const Graph& g) : components_(g.components()) {
  const Matrix l = laplacian(g).toDense();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(l);
  if (eig.info() != Eigen::Success) throw NumericalError("Laplacian eigendecomposition failed");
  const Vector& lambda = eig.eigenvalues();
  const double cutoff = 1e-10 * lambda.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i)
    if (lambda[i] > cutoff) inv[i] = 1.0 / lambda[i];
  pinv_ = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();

  component_volume_.assign(static_cast<std::size_t>(g.num_components()), 0.0);
  for (Index i = 0; i < g.size(); ++i)
    component_volume_[static_cast<std::size_t>(components_[static_cast<std::size_t>(i)])] +=
        g.degrees()[i];
}

double CommuteTimes::operator()(Index i, Index j) const {
  const Index n = pinv_.rows();
  if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidParameter("node index out of range");
  if (i == j) return 0.0;
  const Index ci = components_[static_cast<std::size_t>(i)];
  if (ci != components_[static_cast<std::size_t>(j)])
    throw GraphError("nodes " + std::to_string(i) + " and " + std::to_string(j) +
                     " are disconnected; commute time is infinite");
  const double r = pinv_(i, i) + pinv_(j, j) - 2.0 * pinv_(i, j);
  return component_volume_[static_cast<std::size_t>(ci)] * std::max(r, 0.0);
}

double CommuteTimes::to_set(Index i, std::span<const Index> set) const {
  if (set.empty()) throw InvalidParameter("commute time to an empty set is undefined");
  double sum = 0.0;
  for (Index b : set) sum += (*this)(i, b);
  return sum / static_cast<double>(set.size());
}

double commute_time(const Graph& g, Index i, Index j) { return CommuteTimes(g)(i, j); }

double commute_time_to_set(const Graph& g, Index i, std::span<const Index> set) {
  return CommuteTimes(g).to_set(i, set);
}

}  // namespace gssl
