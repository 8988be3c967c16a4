#pragma once

#include "gssl/graph.hpp"

#include <vector>

namespace gssl {

struct PropagationConfig {
  double alpha = 0.99;
  /// Stop once the max-abs update of one sweep falls below this.
  double tolerance = 1e-8;
  int max_iterations = 10000;

  void validate() const;
};

struct PropagationResult {
  LabelMatrix scores;
  /// Row argmax of scores, lowest class index on ties.
  std::vector<int> predicted;
  int iterations = 0;
  bool converged = true;
};

PropagationResult make_result(LabelMatrix scores, int iterations = 0, bool converged = true);

/// Local and global consistency, closed form: F = (1 - alpha) (I - alpha S)^{-1} Y.
PropagationResult lgc_closed(const Graph& g, const LabelMatrix& seeds, double alpha);

/// Fixed-point sweep F <- alpha S F + (1 - alpha) Y starting from Y.
/// Running out of iterations is reported through converged = false.
PropagationResult lgc_iterate(const Graph& g, const LabelMatrix& seeds, const PropagationConfig& cfg);

/// Harmonic-function solution: labeled rows clamped to their one-hot seeds,
/// f_U = (I - P_UU)^{-1} P_UL f_L.
PropagationResult gfhf(const Graph& g, const Dataset& data);

/// Row-stochastic diffusion matrix with per-edge conductance gamma * W_ij / r_ij,
/// r_ij the Euclidean distance clamped below at 1e-12.
SparseMatrix fick_diffusion_matrix(const Dataset& data, const Graph& g, double gamma);

/// Fick's-law propagation, closed form f* = (1 - alpha) (I - alpha P)^{-1} Y.
PropagationResult flap_closed(const Graph& g, const Dataset& data, double alpha, double gamma);
PropagationResult flap_closed(const SparseMatrix& diffusion, const LabelMatrix& seeds, double alpha);

/// Fick's-law propagation by iterating f <- alpha P f + (1 - alpha) y, one column per class.
PropagationResult flap_iterate(const Graph& g, const Dataset& data, const PropagationConfig& cfg,
                               double gamma);
PropagationResult flap_iterate(const SparseMatrix& diffusion, const LabelMatrix& seeds,
                               const PropagationConfig& cfg);

}  // namespace gssl
