#pragma once

#include "gssl/graph.hpp"
#include "gssl/kernel_model.hpp"

#include <optional>

namespace gssl {

struct PosteriorEstimate {
  /// n x c, rows sum to 1, entries in [0, 1].
  Matrix posteriors;
};

struct PosteriorOptions {
  Index k = 10;
  std::optional<double> sigma;  // graph kernel width, auto when empty
  double alpha = 0.99;
  /// Per-node propagation rates in (0, 1). When empty every node uses alpha.
  std::optional<Vector> local_rates;
};

/// Constrained LGC posterior estimate on a graph that already carries the
/// label constraints: the fixed point of F <- Lambda S F + (I - Lambda) Y,
/// negatives clamped, rows normalized; all-zero rows become uniform.
PosteriorEstimate estimate_posteriors(const Graph& constrained, const Dataset& data,
                                      const PosteriorOptions& options);

/// Builds the must-link / cannot-link k-NN graph from the labels, then estimates.
PosteriorEstimate estimate_posteriors(const Dataset& data, const PosteriorOptions& options);

/// Weighted vector-output least-squares kernel fit. Per class, solves
///   [ Omega + V^{-1}/gamma  1 ] [a_c]   [F_c]
///   [ 1^T                   0 ] [b_c] = [ 0 ]
/// through the SPD block Omega + V^{-1}/gamma.
KernelModel fit_posterior_regressor(const Matrix& features, const Matrix& targets, double sigma,
                                    double gamma, const Vector& weights);

/// Hampel weights on residual norms, measured as the excess over the median norm
/// in robust scales: 1 up to c1, linear down to c2, 1e-4 beyond. Scale = 1.483 * MAD;
/// a zero MAD yields all-one weights.
Vector robust_weights(const Vector& residual_norms, double c1 = 2.5, double c2 = 3.0);

/// Row norms of targets - model(features).
Vector residual_norms(const KernelModel& model, const Matrix& features, const Matrix& targets);

/// Raw output clamped to [0, 1] and renormalized to sum 1 (uniform if everything clamps to 0).
Vector predict_posterior(const KernelModel& model, const Vector& x);
Matrix predict_posteriors(const KernelModel& model, const Matrix& xs);

struct PdlOptions {
  PosteriorOptions posterior;
  std::optional<double> regression_sigma;  // defaults to the graph kernel width
  double gamma = 100.0;
  bool robust = true;
};

struct PdlFit {
  PosteriorEstimate estimate;
  KernelModel model;
  Vector weights;
};

/// Posterior estimation followed by the two-stage (unweighted, then Hampel-reweighted) fit.
PdlFit train_pdl(const Dataset& data, const PdlOptions& options);

}  // namespace gssl
