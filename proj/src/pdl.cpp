#include "gssl/pdl.hpp"

#include "gssl/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <string>

namespace gssl {
namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

Vector normalize_posterior_row(Vector row) {
  row = row.cwiseMax(0.0).cwiseMin(1.0);
  const double s = row.sum();
  if (s > 0.0) return row / s;
  return Vector::Constant(row.size(), 1.0 / static_cast<double>(row.size()));
}

}  // namespace

PosteriorEstimate estimate_posteriors(const Graph& constrained, const Dataset& data,
                                      const PosteriorOptions& options) {
  if (constrained.size() != data.size()) throw InvalidParameter("dataset and graph sizes differ");
  const auto sets = data.class_sets();
  for (std::size_t c = 0; c < sets.size(); ++c)
    if (sets[c].empty()) throw InvalidParameter("class " + std::to_string(c) + " has no labeled sample");

  const Index n = data.size();
  Vector rates = options.local_rates.value_or(Vector::Constant(n, options.alpha));
  if (rates.size() != n) throw InvalidParameter("local propagation rates must have one entry per sample");
  for (Index i = 0; i < n; ++i)
    if (!(rates[i] > 0.0 && rates[i] < 1.0))
      throw InvalidParameter("local propagation rate of sample " + std::to_string(i) +
                             " is outside (0, 1)");

  // Fixed point of F <- Lambda S F + (I - Lambda) Y.
  SparseMatrix system = -(rates.asDiagonal() * normalized_smoother(constrained));
  for (Index i = 0; i < n; ++i) system.coeffRef(i, i) += 1.0;
  system.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu(system);
  if (lu.info() != Eigen::Success) throw NumericalError("posterior propagation system is singular");
  const Matrix rhs = (Vector::Ones(n) - rates).asDiagonal() * one_hot_seeds(data);
  const Matrix f = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !f.allFinite()) throw NumericalError("posterior propagation failed");

  PosteriorEstimate est;
  est.posteriors.resize(n, data.num_classes());
  for (Index i = 0; i < n; ++i) est.posteriors.row(i) = normalize_posterior_row(f.row(i).transpose()).transpose();
  return est;
}

PosteriorEstimate estimate_posteriors(const Dataset& data, const PosteriorOptions& options) {
  const Graph g = build_knn_graph(data, options.k, options.sigma, constraints_from_labels(data));
  return estimate_posteriors(g, data, options);
}

KernelModel fit_posterior_regressor(const Matrix& features, const Matrix& targets, double sigma,
                                    double gamma, const Vector& weights) {
  const Index m = features.rows();
  if (m < 1) throw InvalidParameter("regressor needs at least one training point");
  if (targets.rows() != m || weights.size() != m)
    throw InvalidParameter("features, targets and weights must have the same length");
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  if (!(gamma > 0.0)) throw InvalidParameter("gamma must be positive");
  for (Index j = 0; j < m; ++j)
    if (!(weights[j] > 0.0)) throw InvalidParameter("sample weights must be positive");

  Matrix h = gaussian_gram(features, features, sigma);
  h.diagonal() += (gamma * weights).cwiseInverse();
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success)
    throw NumericalError("regression system is singular; use a smaller gamma (stronger ridge)");
  const Vector eta = llt.solve(Vector::Ones(m));
  const Matrix nu = llt.solve(targets);
  const double denom = eta.sum();
  if (!(std::abs(denom) > 0.0)) throw NumericalError("regression bias equation is degenerate");

  KernelModel model;
  model.kind = "pdl";
  model.support_points = features;
  model.bias = nu.colwise().sum().transpose() / denom;
  model.coefficients = nu - eta * model.bias.transpose();
  model.has_bias = true;
  model.sigma = sigma;
  model.regularization = gamma;
  if (!model.coefficients.allFinite()) throw NumericalError("regression produced non-finite coefficients");
  return model;
}

Vector robust_weights(const Vector& residual_norms, double c1, double c2) {
  const Index m = residual_norms.size();
  Vector w = Vector::Ones(m);
  if (m == 0) return w;
  if (!(c1 > 0.0 && c2 > c1)) throw InvalidParameter("robust weights need 0 < c1 < c2");
  std::vector<double> r(residual_norms.data(), residual_norms.data() + m);
  const double med = median(r);
  std::vector<double> dev(r.size());
  std::transform(r.begin(), r.end(), dev.begin(), [med](double x) { return std::abs(x - med); });
  const double scale = 1.483 * median(dev);
  if (!(scale > 0.0)) return w;
  // Residual norms are one-sided, so standardize the excess over the median norm.
  for (Index j = 0; j < m; ++j) {
    const double ratio = std::max(residual_norms[j] - med, 0.0) / scale;
    if (ratio <= c1)
      w[j] = 1.0;
    else if (ratio <= c2)
      w[j] = (c2 - ratio) / (c2 - c1);
    else
      w[j] = 1e-4;
  }
  // the linear ramp reaches 0 at exactly c2
  return w.cwiseMax(1e-4);
}

Vector residual_norms(const KernelModel& model, const Matrix& features, const Matrix& targets) {
  return (targets - model.raw_outputs(features)).rowwise().norm();
}

Vector predict_posterior(const KernelModel& model, const Vector& x) {
  return normalize_posterior_row(model.raw_output(x));
}

Matrix predict_posteriors(const KernelModel& model, const Matrix& xs) {
  const Matrix raw = model.raw_outputs(xs);
  Matrix out(raw.rows(), raw.cols());
  for (Index i = 0; i < raw.rows(); ++i) out.row(i) = normalize_posterior_row(raw.row(i).transpose()).transpose();
  return out;
}

PdlFit train_pdl(const Dataset& data, const PdlOptions& options) {
  const double graph_sigma =
      options.posterior.sigma ? *options.posterior.sigma : auto_sigma(data.features(), options.posterior.k);
  PosteriorOptions post = options.posterior;
  post.sigma = graph_sigma;

  PdlFit fit;
  fit.estimate = estimate_posteriors(data, post);
  const double sigma = options.regression_sigma.value_or(graph_sigma);
  fit.weights = Vector::Ones(data.size());
  fit.model = fit_posterior_regressor(data.features(), fit.estimate.posteriors, sigma, options.gamma,
                                      fit.weights);
  if (options.robust) {
    fit.weights = robust_weights(residual_norms(fit.model, data.features(), fit.estimate.posteriors));
    fit.model = fit_posterior_regressor(data.features(), fit.estimate.posteriors, sigma,
                                        options.gamma, fit.weights);
  }
  return fit;
}

}  // namespace gssl
