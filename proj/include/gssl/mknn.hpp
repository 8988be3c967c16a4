#pragma once

#include "gssl/propagation.hpp"

namespace gssl {

/// Accumulated visits of the geometrically damped random walk,
/// (I - alpha P)^{-1} = sum_k (alpha P)^k. Entry (i, j) is the similarity of j seen from i.
struct ManifoldSimilarity {
  Matrix matrix;
  double alpha = 0.99;
};

/// Dense (I - alpha P)^{-1} for the walk matrix of g. Pass a graph that already
/// carries the label constraints (see constraints_from_labels / apply_constraints).
ManifoldSimilarity fatigue_similarity(const Graph& g, double alpha);

/// Weighted k-NN vote over labeled samples using one similarity row per query.
/// Returns per-class sums of the k largest labeled similarities.
Vector manifold_vote(const Vector& similarity_row, const Dataset& data, Index k);

/// Classifies every unlabeled sample from its k most similar labeled samples.
/// Labeled rows keep their one-hot seeds. When fewer than k samples are labeled,
/// all of them vote and a warning is emitted.
PropagationResult mknn_classify(const ManifoldSimilarity& sim, const Dataset& data, Index k);

/// Simplex-constrained reconstruction: argmin |x - X^T z|^2, z >= 0, sum z = 1,
/// where X holds one neighbour per row. Primal active-set method.
Vector reconstruct_weights(const Vector& x, const Matrix& neighbors);

/// argmin_{w >= 0} |w - W^T z|^2, i.e. the elementwise clamp of W^T z.
/// neighbor_rows holds one similarity row (length n) per neighbour.
Vector online_similarity(const Vector& z, const Matrix& neighbor_rows);

/// Classifies a sample outside the stored set: k_nn Euclidean neighbours,
/// reconstruction weights, reconstructed similarity row, then the k_vote vote.
int online_classify(const ManifoldSimilarity& sim, const Dataset& data, const Vector& x, Index k_nn,
                    Index k_vote);

}  // namespace gssl
