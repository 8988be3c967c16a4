#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// into the code paths it checks.

#include "gssl/dataset.hpp"
#include "gssl/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using gssl::Index;
using gssl::Matrix;
using gssl::Vector;

/// Dense symmetric weight matrix of a random connected graph: a random spanning
/// path plus extra edges with probability p, weights in [0.1, 1].
inline Matrix random_connected_weights(Index n, double p, std::uint64_t seed) {
  gssl::Rng rng(seed);
  Matrix w = Matrix::Zero(n, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  for (Index i = 0; i + 1 < n; ++i) {
    const double v = 0.1 + 0.9 * rng.uniform();
    w(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i + 1)]) = v;
    w(order[static_cast<std::size_t>(i + 1)], order[static_cast<std::size_t>(i)]) = v;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (w(i, j) == 0.0 && rng.uniform() < p) {
        const double v = 0.1 + 0.9 * rng.uniform();
        w(i, j) = v;
        w(j, i) = v;
      }
  return w;
}

inline Matrix walk_matrix(const Matrix& w) {
  return w.rowwise().sum().cwiseInverse().asDiagonal() * w;
}

/// Expected hitting time from every node to target: h_t = 0, h_x = 1 + sum_y P_xy h_y.
inline Vector hitting_times(const Matrix& w, Index target) {
  const Matrix p = walk_matrix(w);
  const Index n = w.rows();
  Matrix a = Matrix::Identity(n, n) - p;
  Vector b = Vector::Ones(n);
  a.row(target).setZero();
  a(target, target) = 1.0;
  b[target] = 0.0;
  return a.fullPivLu().solve(b);
}

inline double brute_commute(const Matrix& w, Index i, Index j) {
  return hitting_times(w, j)[i] + hitting_times(w, i)[j];
}

/// sum_{k=0}^{K} (alpha P)^k by repeated multiplication.
inline Matrix neumann_partial_sum(const Matrix& p, double alpha, int terms) {
  const Index n = p.rows();
  Matrix sum = Matrix::Identity(n, n);
  Matrix power = Matrix::Identity(n, n);
  for (int k = 1; k <= terms; ++k) {
    power = alpha * (power * p);
    sum += power;
  }
  return sum;
}

inline int neumann_terms(double alpha) { return static_cast<int>(std::ceil(std::log(1e-9) / std::log(alpha))); }

/// Dense LGC: (1 - alpha) (I - alpha D^-1/2 W D^-1/2)^{-1} Y with D the row sums of W
/// (diagonal of W included as given).
inline Matrix dense_lgc(const Matrix& w, const Matrix& y, double alpha) {
  const Vector d = w.rowwise().sum();
  const Vector r = d.cwiseSqrt().cwiseInverse();
  const Matrix s = r.asDiagonal() * w * r.asDiagonal();
  return (1.0 - alpha) * (Matrix::Identity(w.rows(), w.rows()) - alpha * s).fullPivLu().solve(y);
}

/// Exact Gaussian kernel with zero diagonal.
inline Matrix gaussian_kernel(const Matrix& x, double sigma, bool zero_diagonal) {
  const Index n = x.rows();
  Matrix k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      k(i, j) = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2 * sigma * sigma));
  if (zero_diagonal) k.diagonal().setZero();
  return k;
}

/// Euclidean projection onto the probability simplex (sort-based).
inline Vector project_simplex(const Vector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

/// Projected gradient descent on |x - X^T z|^2 over the simplex, run to a 1e-10 fixpoint.
inline Vector simplex_ls_projected_gradient(const Vector& x, const Matrix& neighbors) {
  const Index k = neighbors.rows();
  const Matrix h = neighbors * neighbors.transpose();
  const Vector b = neighbors * x;
  const double lipschitz = std::max(1e-12, Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().maxCoeff());
  Vector z = Vector::Constant(k, 1.0 / static_cast<double>(k));
  for (int it = 0; it < 2000000; ++it) {
    const Vector next = project_simplex(z - (h * z - b) / lipschitz);
    const double change = (next - z).cwiseAbs().maxCoeff();
    z = next;
    if (change < 1e-14) break;
  }
  return z;
}

/// Every size-s subset of {0..m-1}, lexicographic.
inline void for_each_subset(Index m, Index s, const std::function<void(const std::vector<Index>&)>& f) {
  std::vector<Index> idx(static_cast<std::size_t>(s));
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == s) {
      f(idx);
      return;
    }
    for (Index i = start; i < m; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

inline const double kLog2PiE = std::log(2.0 * std::numbers::pi * std::numbers::e);

// R(S) from a dense inverse of the unlabeled precision block.
inline double reliability(const Matrix& w, const std::vector<Index>& subset, const std::vector<Index>& labeled,
                          double eps) {
  const Index n = w.rows();
  Matrix q = Matrix(w.rowwise().sum().asDiagonal()) - w;
  q.diagonal().array() += eps;
  std::vector<Index> unl;
  for (Index i = 0; i < n; ++i)
    if (std::find(labeled.begin(), labeled.end(), i) == labeled.end()) unl.push_back(i);
  const Index m = static_cast<Index>(unl.size());
  Matrix quu(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) quu(a, b) = q(unl[static_cast<std::size_t>(a)], unl[static_cast<std::size_t>(b)]);
  const Matrix cov = quu.inverse();
  const Index k = static_cast<Index>(subset.size());
  Matrix s(k, k);
  auto pos = [&](Index v) { return static_cast<Index>(std::find(unl.begin(), unl.end(), v) - unl.begin()); };
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) s(a, b) = cov(pos(subset[static_cast<std::size_t>(a)]), pos(subset[static_cast<std::size_t>(b)]));
  return -0.5 * (static_cast<double>(k) * kLog2PiE + std::log(s.determinant()));
}

// D(S) from hitting-time commute times.
inline double discriminability(const Matrix& w, const std::vector<Index>& subset,
                               const std::vector<std::vector<Index>>& classes) {
  double total = 0.0;
  for (Index x : subset) {
    std::vector<double> t;
    for (const auto& c : classes) {
      if (c.empty()) continue;
      double sum = 0.0;
      for (Index j : c) sum += x == j ? 0.0 : brute_commute(w, x, j);
      t.push_back(sum / static_cast<double>(c.size()));
    }
    std::sort(t.begin(), t.end());
    total += t[1] - t[0];
  }
  return total;
}

}  // namespace oracle
