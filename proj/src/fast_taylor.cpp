#include "gssl/fast_taylor.hpp"

#include "gssl/error.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace gssl {

KernelFactorization factorize_kernel(const Matrix& features, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
  const Index n = features.rows();
  const Index d = features.cols();
  KernelFactorization f;
  f.sigma = sigma;
  f.scale = (-features.rowwise().squaredNorm() / (2.0 * sigma * sigma)).array().exp().matrix();
  f.left.resize(n, d + 1);
  f.left.col(0).setOnes();
  f.left.rightCols(d) = features / sigma;
  f.left = f.scale.asDiagonal() * f.left;
  f.right = f.left;
  f.degree = f.left * (f.right.transpose() * Vector::Ones(n));
  for (Index i = 0; i < n; ++i) {
    if (!(f.degree[i] > 0.0))
      throw NumericalError("approximate degree of sample " + std::to_string(i) + " is " +
                           std::to_string(f.degree[i]) +
                           "; the first-order expansion is out of range, use a larger sigma");
  }
  return f;
}

Matrix approximate_kernel(const KernelFactorization& f) { return f.left * f.right.transpose(); }

Matrix low_rank_update_solve(const Vector& diag, const Matrix& u, const Matrix& v, double s,
                             const Matrix& b) {
  const Index n = diag.size();
  if (u.rows() != n || v.rows() != n || b.rows() != n || u.cols() != v.cols())
    throw InvalidParameter("low-rank solve: shape mismatch");
  for (Index i = 0; i < n; ++i)
    if (diag[i] == 0.0) throw InvalidParameter("low-rank solve: zero diagonal entry");
  const Vector dinv = diag.cwiseInverse();
  const Matrix dinv_b = dinv.asDiagonal() * b;
  if (u.cols() == 0) return dinv_b;
  const Matrix dinv_u = dinv.asDiagonal() * u;
  const Index r = u.cols();
  const Matrix inner = Matrix::Identity(r, r) + s * (v.transpose() * dinv_u);
  Eigen::FullPivLU<Matrix> lu(inner);
  if (!lu.isInvertible())
    throw NumericalError("inner " + std::to_string(r) + "x" + std::to_string(r) +
                         " system of the low-rank solve is singular");
  const Matrix correction = lu.solve(v.transpose() * dinv_b);
  return dinv_b - s * dinv_u * correction;
}

Matrix woodbury_apply(const Vector& diag, const Matrix& a, const Matrix& b) {
  return low_rank_update_solve(diag, a, a, 1.0, b);
}

PropagationResult fast_lgc(const Dataset& data, const LabelMatrix& seeds, double alpha, double sigma,
                           const FastLgcOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha must lie in (0, 1)");
  if (seeds.rows() != data.size()) throw InvalidParameter("seed rows do not match sample count");
  Matrix x = data.features();
  if (options.center) x.rowwise() -= x.colwise().mean();
  const KernelFactorization f = factorize_kernel(x, sigma);
  const Vector& k = f.degree;

  // With W ~= G M^T and K = diag(W 1):
  //   symmetric:   (I - a K^-1/2 W K^-1/2)^-1 Y = K^1/2 (K - a G M^T)^-1 K^1/2 Y
  //   random walk: (I - a K^-1 W)^-1 Y          = (K - a G M^T)^-1 K Y
  Matrix scores;
  if (options.variant == RankingVariant::Symmetric) {
    const Vector root = k.cwiseSqrt();
    scores = root.asDiagonal() *
             low_rank_update_solve(k, f.left, f.right, -alpha, root.asDiagonal() * seeds);
  } else {
    scores = low_rank_update_solve(k, f.left, f.right, -alpha, k.asDiagonal() * seeds);
  }
  scores *= (1.0 - alpha);
  if (!scores.allFinite()) throw NumericalError("fast LGC produced non-finite scores");
  return make_result(std::move(scores));
}

}  // namespace gssl
