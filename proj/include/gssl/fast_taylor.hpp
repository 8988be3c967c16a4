#pragma once

#include "gssl/propagation.hpp"

namespace gssl {

/// Rank-(d+1) factorization of the first-order expanded Gaussian kernel.
///
/// exp(-|xi-xj|^2/2s^2) = a_i a_j exp(xi.xj/s^2) ~= a_i a_j (1 + xi.xj/s^2) = (G M^T)_ij
/// with a_i = exp(-|xi|^2/2s^2) and G_i = M_i = a_i [1, xi^T/s].
struct KernelFactorization {
  Vector scale;   // a
  Matrix left;    // G, n x (d+1)
  Matrix right;   // M, n x (d+1)
  Vector degree;  // diagonal of K: row sums of G M^T
  double sigma = 1.0;
};

/// Throws NumericalError when an approximate degree is not positive; a larger
/// sigma brings the expansion back into its accurate range.
KernelFactorization factorize_kernel(const Matrix& features, double sigma);

/// Dense G M^T. Test and diagnostic helper, O(n^2) memory.
Matrix approximate_kernel(const KernelFactorization& f);

/// (D + s U V^T)^{-1} B through an r x r inner solve, D = diag(diag).
Matrix low_rank_update_solve(const Vector& diag, const Matrix& u, const Matrix& v, double s,
                             const Matrix& b);

/// (A A^T + D)^{-1} B by the Woodbury identity.
Matrix woodbury_apply(const Vector& diag, const Matrix& a, const Matrix& b);

enum class RankingVariant {
  /// (I - alpha K^{-1/2} W K^{-1/2})^{-1}, the LGC ranking operator.
  Symmetric,
  /// (I - alpha K^{-1} W)^{-1}, the random-walk ranking operator.
  RandomWalk,
};

struct FastLgcOptions {
  RankingVariant variant = RankingVariant::Symmetric;
  /// Subtract the feature mean first. The exact kernel is translation invariant;
  /// the expansion is most accurate near the origin.
  bool center = true;
};

/// LGC on the approximate kernel, (1 - alpha) R Y, without forming any n x n matrix.
/// Cost O(n d^2 c + d^3).
PropagationResult fast_lgc(const Dataset& data, const LabelMatrix& seeds, double alpha, double sigma,
                           const FastLgcOptions& options = {});

}  // namespace gssl
