#include "gssl/mknn.hpp"

#include "gssl/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <numeric>
#include <string>

namespace gssl {

ManifoldSimilarity fatigue_similarity(const Graph& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
  const Index n = g.size();
  const Matrix a = Matrix::Identity(n, n) - alpha * Matrix(random_walk_matrix(g));
  Eigen::PartialPivLU<Matrix> lu(a);
  Matrix inv = lu.inverse();
  // one step of iterative refinement: X <- X + X (I - A X)
  const Matrix residual = Matrix::Identity(n, n) - a * inv;
  inv += inv * residual;
  const double err = (Matrix::Identity(n, n) - a * inv).cwiseAbs().rowwise().sum().maxCoeff();
  if (!(err <= 1e-10)) throw NumericalError("fatigue similarity inversion residual " + std::to_string(err));
  return {std::move(inv), alpha};
}

Vector manifold_vote(const Vector& similarity_row, const Dataset& data, Index k) {
  const auto labeled = data.labeled_indices();
  if (labeled.empty()) throw InvalidParameter("no labeled samples to vote");
  if (k < 1) throw InvalidParameter("k must be positive");
  std::vector<Index> order(labeled);
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](Index a, Index b) {
                      if (similarity_row[a] != similarity_row[b]) return similarity_row[a] > similarity_row[b];
                      return a < b;
                    });
  Vector score = Vector::Zero(data.num_classes());
  for (std::size_t r = 0; r < take; ++r)
    score[*data.labels()[static_cast<std::size_t>(order[r])]] += similarity_row[order[r]];
  return score;
}

PropagationResult mknn_classify(const ManifoldSimilarity& sim, const Dataset& data, Index k) {
  if (sim.matrix.rows() != data.size()) throw InvalidParameter("similarity and dataset sizes differ");
  data.require_labels();
  const auto labeled = data.labeled_indices();
  if (k > static_cast<Index>(labeled.size()))
    warn("mknn: k = " + std::to_string(k) + " exceeds the " + std::to_string(labeled.size()) +
         " labeled samples; all of them vote");
  LabelMatrix scores = one_hot_seeds(data);
  for (Index i : data.unlabeled_indices())
    scores.row(i) = manifold_vote(sim.matrix.row(i).transpose(), data, k).transpose();
  return make_result(std::move(scores));
}

Vector reconstruct_weights(const Vector& x, const Matrix& neighbors) {
  const Index k = neighbors.rows();
  if (k < 1) throw InvalidParameter("reconstruction needs at least one neighbour");
  if (neighbors.cols() != x.size()) throw InvalidParameter("neighbour dimension mismatch");
  if (k == 1) return Vector::Ones(1);

  // minimize 0.5 z^T H z - b^T z on the simplex, H = X X^T (+ tiny ridge for uniqueness)
  Matrix h = neighbors * neighbors.transpose();
  const double ridge = 1e-12 * (h.trace() / static_cast<double>(k) + 1.0);
  h.diagonal().array() += ridge;
  const Vector b = neighbors * x;
  constexpr double kTol = 1e-12;

  // start at the vertex of the nearest neighbour
  Index start = 0;
  (neighbors.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&start);
  Vector z = Vector::Zero(k);
  z[start] = 1.0;
  std::vector<char> free_set(static_cast<std::size_t>(k), 0);
  free_set[static_cast<std::size_t>(start)] = 1;

  for (int iter = 0; iter < 100 * static_cast<int>(k) + 100; ++iter) {
    std::vector<Index> f;
    for (Index i = 0; i < k; ++i)
      if (free_set[static_cast<std::size_t>(i)]) f.push_back(i);
    const Index nf = static_cast<Index>(f.size());

    // equality-constrained subproblem on the free set
    Matrix kkt = Matrix::Zero(nf + 1, nf + 1);
    Vector rhs(nf + 1);
    for (Index a = 0; a < nf; ++a) {
      for (Index c = 0; c < nf; ++c) kkt(a, c) = h(f[static_cast<std::size_t>(a)], f[static_cast<std::size_t>(c)]);
      kkt(a, nf) = 1.0;
      kkt(nf, a) = 1.0;
      rhs[a] = b[f[static_cast<std::size_t>(a)]];
    }
    rhs[nf] = 1.0;
    const Vector sol = kkt.fullPivLu().solve(rhs);
    Vector p = Vector::Zero(k);
    for (Index a = 0; a < nf; ++a) p[f[static_cast<std::size_t>(a)]] = sol[a];

    bool feasible = true;
    for (Index i : f)
      if (p[i] < -kTol) feasible = false;

    if (feasible) {
      z = p.cwiseMax(0.0);
      z /= z.sum();
      const Vector grad = h * z - b;
      double level = 0.0;
      for (Index i : f) level += grad[i];
      level /= static_cast<double>(nf);
      // release the bound constraint with the most negative multiplier
      Index release = -1;
      double worst = -1e-12 * (1.0 + b.cwiseAbs().maxCoeff());
      for (Index i = 0; i < k; ++i) {
        if (free_set[static_cast<std::size_t>(i)]) continue;
        const double mult = grad[i] - level;
        if (mult < worst) {
          worst = mult;
          release = i;
        }
      }
      if (release < 0) return z;
      free_set[static_cast<std::size_t>(release)] = 1;
    } else {
      // step toward p until the first free coordinate hits zero
      double step = 1.0;
      Index block = -1;
      for (Index i : f) {
        if (p[i] < -kTol) {
          const double t = z[i] / (z[i] - p[i]);
          if (t < step) {
            step = t;
            block = i;
          }
        }
      }
      z += step * (p - z);
      if (block >= 0) {
        z[block] = 0.0;
        free_set[static_cast<std::size_t>(block)] = 0;
      }
      for (Index i : f)
        if (z[i] <= 0.0) {
          z[i] = 0.0;
          free_set[static_cast<std::size_t>(i)] = 0;
        }
      if (std::none_of(free_set.begin(), free_set.end(), [](char c) { return c != 0; })) {
        z.setZero();
        z[start] = 1.0;
        free_set[static_cast<std::size_t>(start)] = 1;
      }
    }
  }
  throw NumericalError("simplex reconstruction did not converge");
}

Vector online_similarity(const Vector& z, const Matrix& neighbor_rows) {
  if (neighbor_rows.rows() != z.size()) throw InvalidParameter("weights and neighbour rows disagree");
  return (neighbor_rows.transpose() * z).cwiseMax(0.0);
}

int online_classify(const ManifoldSimilarity& sim, const Dataset& data, const Vector& x, Index k_nn,
                    Index k_vote) {
  const Matrix& feats = data.features();
  if (x.size() != feats.cols()) throw InvalidParameter("query dimension mismatch");
  if (k_nn < 1 || k_nn > feats.rows()) throw InvalidParameter("k_nn must lie in [1, n]");
  std::vector<std::pair<double, Index>> dist;
  dist.reserve(static_cast<std::size_t>(feats.rows()));
  for (Index i = 0; i < feats.rows(); ++i) dist.emplace_back((feats.row(i) - x.transpose()).squaredNorm(), i);
  std::partial_sort(dist.begin(), dist.begin() + k_nn, dist.end());

  Matrix neighbors(k_nn, feats.cols());
  Matrix rows(k_nn, sim.matrix.cols());
  for (Index r = 0; r < k_nn; ++r) {
    neighbors.row(r) = feats.row(dist[static_cast<std::size_t>(r)].second);
    rows.row(r) = sim.matrix.row(dist[static_cast<std::size_t>(r)].second);
  }
  const Vector z = reconstruct_weights(x, neighbors);
  const Vector w = online_similarity(z, rows);
  const Vector score = manifold_vote(w, data, k_vote);
  Index best = 0;
  for (Index c = 1; c < score.size(); ++c)
    if (score[c] > score[best]) best = c;
  return static_cast<int>(best);
}

}  // namespace gssl
