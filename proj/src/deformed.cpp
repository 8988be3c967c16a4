#include "gssl/deformed.hpp"

#include "gssl/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include <sstream>

namespace gssl {

void DeformedConfig::validate() const {
  if (!(beta >= 0.0) || !(gamma >= 0.0)) throw InvalidParameter("beta and gamma must be nonnegative");
  if (!(alpha_rkhs > 0.0)) throw InvalidParameter("alpha_rkhs must be positive");
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
}

Vector deformed_penalty_weights(const Graph& g) {
  return Vector::Ones(g.size()) - g.degrees() / g.volume();
}

double deformed_penalty(const Graph& g, const Vector& f) {
  if (f.size() != g.size()) throw InvalidParameter("vector length does not match graph size");
  return (deformed_penalty_weights(g).array() * f.array().square()).sum();
}

namespace {

Vector selector(const Dataset& data) {
  Vector j = Vector::Zero(data.size());
  for (Index i : data.labeled_indices()) j[i] = 1.0;
  return j;
}

}  // namespace

double deformed_objective(const Graph& g, const Dataset& data, const DeformedConfig& cfg,
                          const Vector& f, const Vector& y) {
  const Vector j = selector(data);
  const double fit = (j.array() * (f - y).array().square()).sum();
  const double smooth = f.dot(laplacian(g) * f);
  return fit + cfg.beta * smooth + cfg.gamma * deformed_penalty(g, f);
}

PropagationResult deformed_transductive(const Graph& g, const Dataset& data, const DeformedConfig& cfg) {
  cfg.validate();
  if (data.size() != g.size()) throw InvalidParameter("dataset and graph sizes differ");
  data.require_labels();
  const Vector j = selector(data);
  const Matrix rhs = j.asDiagonal() * signed_seeds(data);
  // No regularizer: unlabeled rows are unconstrained; take the minimum-norm minimizer.
  if (cfg.beta == 0.0 && cfg.gamma == 0.0) return make_result(rhs);

  SparseMatrix system = cfg.beta * laplacian(g);
  const Vector diag = j + cfg.gamma * deformed_penalty_weights(g);
  for (Index i = 0; i < g.size(); ++i) system.coeffRef(i, i) += diag[i];
  system.makeCompressed();

  Eigen::SimplicialLLT<SparseMatrix> llt(system);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(system), Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "deformed Laplacian system is not positive definite (smallest eigenvalue "
        << eig.eigenvalues()[0] << "); reduce gamma or add labels to every component";
    throw NumericalError(msg.str());
  }
  Matrix f = llt.solve(rhs);
  if (llt.info() != Eigen::Success || !f.allFinite()) throw NumericalError("deformed solve failed");
  return make_result(std::move(f));
}

KernelModel deformed_inductive(const Dataset& data, const Graph& g, const DeformedConfig& cfg) {
  cfg.validate();
  if (data.size() != g.size()) throw InvalidParameter("dataset and graph sizes differ");
  data.require_labels();
  const Matrix omega = gaussian_gram(data.features(), data.features(), cfg.sigma);
  const Vector j = selector(data);
  const Matrix lap = laplacian(g).toDense();

  Matrix system = cfg.beta * (lap * omega);
  system += (j + cfg.gamma * deformed_penalty_weights(g)).asDiagonal() * omega;
  system.diagonal().array() += cfg.alpha_rkhs;

  Eigen::FullPivLU<Matrix> lu(system);
  if (!lu.isInvertible()) throw NumericalError("deformed inductive system is singular");
  const Matrix rhs = j.asDiagonal() * signed_seeds(data);
  Matrix a = lu.solve(rhs);
  // one refinement step; the system can be badly scaled for tiny alpha_rkhs
  a += lu.solve(rhs - system * a);
  if (!a.allFinite()) throw NumericalError("deformed inductive solve failed");

  KernelModel model;
  model.kind = "deformed";
  model.support_points = data.features();
  model.coefficients = std::move(a);
  model.bias = Vector::Zero(data.num_classes());
  model.has_bias = false;
  model.sigma = cfg.sigma;
  model.regularization = cfg.alpha_rkhs;
  return model;
}

}  // namespace gssl
