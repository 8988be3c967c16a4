#pragma once

#include "gssl/propagation.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gssl {

struct TeacherConfig {
  double gamma_fb = 1.0;       // steepness of the feedback curve
  double epsilon_gmrf = 1e-6;  // ridge on the Gaussian-field precision L + eps I
  Index s_initial = 1;         // first batch size

  void validate() const;
};

struct CurriculumRound {
  int t = 0;
  std::vector<Index> selected;
  Index batch_size = 0;
  double feedback = 0.0;
  std::optional<double> accuracy_so_far;
  bool fallback = false;  // residual nodes unreachable from the labeled set
};

/// Teacher/learner state. Labeled-so-far = initial seeds plus every selected batch.
struct CurriculumState {
  std::vector<Index> initial;        // L0
  std::vector<int> assigned;         // class per node, -1 while unlabeled
  std::vector<char> in_initial;
  std::vector<Index> selected;       // S^(1:t) in selection order
  LabelMatrix scores;                // F^(t)
  int round = 0;
  std::vector<CurriculumRound> history;

  static CurriculumState initialize(const Dataset& data);

  bool is_labeled(Index i) const { return assigned[static_cast<std::size_t>(i)] >= 0; }
  std::vector<Index> labeled() const;
  std::vector<Index> unlabeled() const;
  std::vector<std::vector<Index>> class_sets(int num_classes) const;
};

/// Unlabeled nodes with at least one labeled neighbour, ascending.
std::vector<Index> labeled_frontier(const Graph& g, const CurriculumState& state);

/// Gaussian-field reliability R(S) = -H(y_S | y_L) with precision Q = L_graph + eps I:
/// Sigma_S is the S block of (Q_UU)^{-1}, R = -1/2 ln((2 pi e)^|S| det Sigma_S).
double reliability(const Graph& g, std::span<const Index> subset, std::span<const Index> labeled,
                   double eps);

/// Sum over x in S of the commute-time margin between the nearest and the
/// second-nearest labeled class. Fewer than two labeled classes gives 0 with a warning.
double discriminability(const CommuteTimes& ct, std::span<const Index> subset,
                        const std::vector<std::vector<Index>>& class_sets);
double discriminability(const Graph& g, std::span<const Index> subset,
                        const std::vector<std::vector<Index>>& class_sets);

/// Greedy maximization of R(S) + D(S) over the frontier, one node at a time,
/// largest marginal gain first, lowest index on ties.
std::vector<Index> select_batch(const Graph& g, const CommuteTimes& ct, std::span<const Index> frontier,
                                std::span<const Index> labeled,
                                const std::vector<std::vector<Index>>& class_sets, Index s, double eps);
std::vector<Index> select_batch(const Graph& g, std::span<const Index> frontier,
                                std::span<const Index> labeled,
                                const std::vector<std::vector<Index>>& class_sets, Index s, double eps);

/// Learner update: L0 rows keep their seeds, rows of every selected node
/// (earlier batches and this one) become P_i F^(t-1). The batch is then
/// labeled by row argmax and joins the labeled set.
const LabelMatrix& learner_step(const SparseMatrix& walk, CurriculumState& state,
                                std::span<const Index> batch);

/// g = 2 / (1 + exp(-gamma (|F_S|_F^2 - s/c))) - 1, c = number of columns.
double feedback(const Matrix& batch_scores, const TeacherConfig& cfg, Index s);

struct TlltResult {
  PropagationResult result;
  CurriculumState state;
};

/// Alternates teacher selection, learner update and feedback until every node is labeled.
/// The next batch size is max(1, ceil(b * max(g, 0))) capped by the frontier size b.
TlltResult tllt_run(const Dataset& data, const Graph& g, const TeacherConfig& cfg);

/// One JSON object per round: {"S_t", "accuracy_so_far", "g_t", "s_t", "t"}.
std::string history_jsonl(const std::vector<CurriculumRound>& history);

}  // namespace gssl
