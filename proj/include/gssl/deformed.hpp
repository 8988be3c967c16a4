#pragma once

#include "gssl/kernel_model.hpp"
#include "gssl/propagation.hpp"

namespace gssl {

struct DeformedConfig {
  double beta = 1.0;         // global smoothness weight (f^T L f)
  double gamma = 0.1;        // local penalty weight (f^T (I - D/nu) f)
  double alpha_rkhs = 1e-3;  // RKHS norm weight, inductive model only
  double sigma = 1.0;        // Gaussian kernel width, inductive model only

  void validate() const;
};

/// Per-node coefficients 1 - D_ii / nu.
Vector deformed_penalty_weights(const Graph& g);

/// f^T (I - D/nu) f.
double deformed_penalty(const Graph& g, const Vector& f);

/// Objective sum_labeled (f_i - y_i)^2 + beta f^T L f + gamma f^T (I - D/nu) f for one column.
double deformed_objective(const Graph& g, const Dataset& data, const DeformedConfig& cfg,
                          const Vector& f, const Vector& y);

/// Per class column (seeds +1 / -1 / 0), f* = (J + beta L + gamma (I - D/nu))^{-1} J y.
/// The system is factored by sparse Cholesky; failure reports the smallest
/// eigenvalue of the system matrix.
PropagationResult deformed_transductive(const Graph& g, const Dataset& data, const DeformedConfig& cfg);

/// Kernel expansion f = sum_i a_i k(x_i, .) over all samples with
/// (alpha I + J Omega + beta L Omega + gamma (I - D/nu) Omega) a = J y per class.
KernelModel deformed_inductive(const Dataset& data, const Graph& g, const DeformedConfig& cfg);

}  // namespace gssl
