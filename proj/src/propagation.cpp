#include "gssl/propagation.hpp"

#include "gssl/error.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <string>

namespace gssl {
namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidParameter("alpha must lie in (0, 1), got " + std::to_string(alpha));
}

void check_seeds(const LabelMatrix& seeds, Index n) {
  if (seeds.rows() != n)
    throw InvalidParameter("seed matrix has " + std::to_string(seeds.rows()) +
                           " rows for a graph with " + std::to_string(n) + " nodes");
  if (!seeds.allFinite()) throw InvalidParameter("seed matrix has non-finite entries");
}

SparseMatrix identity(Index n) {
  SparseMatrix id(n, n);
  id.setIdentity();
  return id;
}

// Solves (I - alpha A) X = (1 - alpha) Y with a general sparse LU.
Matrix solve_shifted(const SparseMatrix& a, const LabelMatrix& y, double alpha) {
  SparseMatrix system = identity(a.rows()) - alpha * a;
  system.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) throw NumericalError("propagation system is singular");
  Matrix x = lu.solve((1.0 - alpha) * y);
  if (lu.info() != Eigen::Success || !x.allFinite())
    throw NumericalError("propagation solve failed");
  return x;
}

PropagationResult iterate(const SparseMatrix& op, const LabelMatrix& y, const PropagationConfig& cfg) {
  cfg.validate();
  const Matrix base = (1.0 - cfg.alpha) * y;
  Matrix f = y;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    Matrix next = cfg.alpha * (op * f) + base;
    const double update = (next - f).cwiseAbs().maxCoeff();
    f.swap(next);
    if (update < cfg.tolerance) return make_result(std::move(f), it, true);
  }
  return make_result(std::move(f), cfg.max_iterations, false);
}

}  // namespace

void PropagationConfig::validate() const {
  check_alpha(alpha);
  if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (max_iterations < 1) throw InvalidParameter("max_iterations must be positive");
}

PropagationResult make_result(LabelMatrix scores, int iterations, bool converged) {
  PropagationResult r;
  r.predicted = row_argmax(scores);
  r.scores = std::move(scores);
  r.iterations = iterations;
  r.converged = converged;
  return r;
}

PropagationResult lgc_closed(const Graph& g, const LabelMatrix& seeds, double alpha) {
  check_alpha(alpha);
  check_seeds(seeds, g.size());
  // I - alpha S is symmetric positive definite because the spectrum of S lies in [-1, 1].
  SparseMatrix system = identity(g.size()) - alpha * normalized_smoother(g);
  system.makeCompressed();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success) throw NumericalError("LGC system is singular");
  Matrix f = ldlt.solve((1.0 - alpha) * seeds);
  if (ldlt.info() != Eigen::Success || !f.allFinite()) throw NumericalError("LGC solve failed");
  return make_result(std::move(f));
}

PropagationResult lgc_iterate(const Graph& g, const LabelMatrix& seeds, const PropagationConfig& cfg) {
  check_seeds(seeds, g.size());
  return iterate(normalized_smoother(g), seeds, cfg);
}

PropagationResult gfhf(const Graph& g, const Dataset& data) {
  if (data.size() != g.size()) throw InvalidParameter("dataset and graph sizes differ");
  data.require_labels();

  // Every component needs at least one labeled node to absorb the walk.
  std::vector<char> has_label(static_cast<std::size_t>(g.num_components()), 0);
  for (Index i = 0; i < g.size(); ++i)
    if (data.is_labeled(i)) has_label[static_cast<std::size_t>(g.components()[static_cast<std::size_t>(i)])] = 1;
  for (Index c = 0; c < g.num_components(); ++c) {
    if (has_label[static_cast<std::size_t>(c)]) continue;
    std::string members;
    int shown = 0;
    for (Index i = 0; i < g.size() && shown < 8; ++i) {
      if (g.components()[static_cast<std::size_t>(i)] != c) continue;
      members += (shown ? ", " : "") + std::to_string(i);
      ++shown;
    }
    throw GraphError("component " + std::to_string(c) + " {" + members +
                     (shown == 8 ? ", ..." : "") + "} has no labeled node");
  }

  const auto unlabeled = data.unlabeled_indices();
  LabelMatrix scores = one_hot_seeds(data);
  if (unlabeled.empty()) return make_result(std::move(scores));

  std::vector<Index> position(static_cast<std::size_t>(g.size()), -1);
  for (std::size_t u = 0; u < unlabeled.size(); ++u)
    position[static_cast<std::size_t>(unlabeled[u])] = static_cast<Index>(u);

  const SparseMatrix p = random_walk_matrix(g);
  const SparseMatrix pt = p.transpose();  // column i of pt holds row i of p
  const Index nu = static_cast<Index>(unlabeled.size());
  std::vector<Eigen::Triplet<double>> trips;
  Matrix rhs = Matrix::Zero(nu, data.num_classes());
  for (Index u = 0; u < nu; ++u) {
    const Index i = unlabeled[static_cast<std::size_t>(u)];
    trips.emplace_back(u, u, 1.0);
    for (SparseMatrix::InnerIterator it(pt, i); it; ++it) {
      const Index j = it.row();
      if (const Index pj = position[static_cast<std::size_t>(j)]; pj >= 0)
        trips.emplace_back(u, pj, -it.value());
      else
        rhs.row(u) += it.value() * scores.row(j);
    }
  }
  SparseMatrix system(nu, nu);
  system.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SparseMatrix> lu(system);
  if (lu.info() != Eigen::Success) throw NumericalError("harmonic system is singular");
  const Matrix fu = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !fu.allFinite()) throw NumericalError("harmonic solve failed");
  for (Index u = 0; u < nu; ++u) scores.row(unlabeled[static_cast<std::size_t>(u)]) = fu.row(u);
  return make_result(std::move(scores));
}

SparseMatrix fick_diffusion_matrix(const Dataset& data, const Graph& g, double gamma) {
  if (data.size() != g.size()) throw InvalidParameter("dataset and graph sizes differ");
  if (!(gamma > 0.0)) throw InvalidParameter("diffusion coefficient gamma must be positive");
  constexpr double kMinDistance = 1e-12;
  const Matrix& x = data.features();
  SparseMatrix c = g.weights();
  for (Index col = 0; col < c.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(c, col); it; ++it) {
      const double r = std::max((x.row(it.row()) - x.row(col)).norm(), kMinDistance);
      it.valueRef() = gamma * it.value() / r;
    }
  }
  Vector row_sum = Vector::Zero(c.rows());
  for (Index col = 0; col < c.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(c, col); it; ++it) row_sum[it.row()] += it.value();
  SparseMatrix p = row_sum.cwiseInverse().asDiagonal() * c;
  p.makeCompressed();
  return p;
}

PropagationResult flap_closed(const SparseMatrix& diffusion, const LabelMatrix& seeds, double alpha) {
  check_alpha(alpha);
  check_seeds(seeds, diffusion.rows());
  return make_result(solve_shifted(diffusion, seeds, alpha));
}

PropagationResult flap_closed(const Graph& g, const Dataset& data, double alpha, double gamma) {
  data.require_labels();
  return flap_closed(fick_diffusion_matrix(data, g, gamma), one_hot_seeds(data), alpha);
}

PropagationResult flap_iterate(const SparseMatrix& diffusion, const LabelMatrix& seeds,
                               const PropagationConfig& cfg) {
  check_seeds(seeds, diffusion.rows());
  return iterate(diffusion, seeds, cfg);
}

PropagationResult flap_iterate(const Graph& g, const Dataset& data, const PropagationConfig& cfg,
                               double gamma) {
  data.require_labels();
  return flap_iterate(fick_diffusion_matrix(data, g, gamma), one_hot_seeds(data), cfg);
}

}  // namespace gssl
