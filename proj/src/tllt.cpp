#include "gssl/tllt.hpp"

#include "gssl/error.hpp"

#include <json.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gssl {

void TeacherConfig::validate() const {
  if (!(gamma_fb > 0.0)) throw InvalidParameter("feedback steepness must be positive");
  if (!(epsilon_gmrf > 0.0)) throw InvalidParameter("field regularizer must be positive");
  if (s_initial < 1) throw InvalidParameter("initial batch size must be positive");
}

CurriculumState CurriculumState::initialize(const Dataset& data) {
  CurriculumState s;
  const Index n = data.size();
  s.assigned.assign(static_cast<std::size_t>(n), -1);
  s.in_initial.assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    if (auto l = data.labels()[static_cast<std::size_t>(i)]) {
      s.assigned[static_cast<std::size_t>(i)] = *l;
      s.in_initial[static_cast<std::size_t>(i)] = 1;
      s.initial.push_back(i);
    }
  }
  s.scores = one_hot_seeds(data);
  return s;
}

std::vector<Index> CurriculumState::labeled() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assigned.size(); ++i)
    if (assigned[i] >= 0) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<Index> CurriculumState::unlabeled() const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < assigned.size(); ++i)
    if (assigned[i] < 0) out.push_back(static_cast<Index>(i));
  return out;
}

std::vector<std::vector<Index>> CurriculumState::class_sets(int num_classes) const {
  std::vector<std::vector<Index>> sets(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < assigned.size(); ++i)
    if (assigned[i] >= 0) sets[static_cast<std::size_t>(assigned[i])].push_back(static_cast<Index>(i));
  return sets;
}

std::vector<Index> labeled_frontier(const Graph& g, const CurriculumState& state) {
  std::vector<Index> out;
  for (Index i = 0; i < g.size(); ++i) {
    if (state.is_labeled(i)) continue;
    for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it) {
      if (state.is_labeled(it.row())) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

namespace {

/// Conditional covariance of the unlabeled field given the labeled one.
class FieldCovariance {
 public:
  FieldCovariance(const Graph& g, std::span<const Index> labeled, double eps)
      : position_(static_cast<std::size_t>(g.size()), -1) {
    if (!(eps > 0.0)) throw InvalidParameter("field regularizer must be positive");
    std::vector<char> is_labeled(static_cast<std::size_t>(g.size()), 0);
    for (Index l : labeled) {
      if (l < 0 || l >= g.size()) throw InvalidParameter("labeled node out of range");
      is_labeled[static_cast<std::size_t>(l)] = 1;
    }
    for (Index i = 0; i < g.size(); ++i)
      if (!is_labeled[static_cast<std::size_t>(i)]) {
        position_[static_cast<std::size_t>(i)] = static_cast<Index>(unlabeled_.size());
        unlabeled_.push_back(i);
      }
    const Matrix q = laplacian(g).toDense();
    const Index nu = static_cast<Index>(unlabeled_.size());
    Matrix quu(nu, nu);
    for (Index a = 0; a < nu; ++a)
      for (Index b = 0; b < nu; ++b)
        quu(a, b) = q(unlabeled_[static_cast<std::size_t>(a)], unlabeled_[static_cast<std::size_t>(b)]);
    quu.diagonal().array() += eps;
    llt_.compute(quu);
    if (llt_.info() != Eigen::Success)
      throw NumericalError("field precision is not positive definite; increase epsilon");
  }

  Matrix block(std::span<const Index> nodes) const {
    const Index k = static_cast<Index>(nodes.size());
    Matrix e = Matrix::Zero(static_cast<Index>(unlabeled_.size()), k);
    for (Index c = 0; c < k; ++c) e(pos(nodes[static_cast<std::size_t>(c)]), c) = 1.0;
    const Matrix cols = llt_.solve(e);
    Matrix out(k, k);
    for (Index r = 0; r < k; ++r) out.row(r) = cols.row(pos(nodes[static_cast<std::size_t>(r)]));
    return 0.5 * (out + out.transpose());
  }

 private:
  Index pos(Index node) const {
    if (node < 0 || node >= static_cast<Index>(position_.size()) ||
        position_[static_cast<std::size_t>(node)] < 0)
      throw InvalidParameter("node " + std::to_string(node) + " is not unlabeled");
    return position_[static_cast<std::size_t>(node)];
  }

  std::vector<Index> position_;
  std::vector<Index> unlabeled_;
  Eigen::LLT<Matrix> llt_;
};

double reliability_of_covariance(const Matrix& cov) {
  if (cov.rows() == 0) return 0.0;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("conditional covariance is not positive definite; increase epsilon");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double log_2pie = std::log(2.0 * std::numbers::pi * std::numbers::e);
  return -0.5 * (static_cast<double>(cov.rows()) * log_2pie + logdet);
}

Matrix sub_block(const Matrix& m, const std::vector<Index>& idx) {
  const Index k = static_cast<Index>(idx.size());
  Matrix out(k, k);
  for (Index a = 0; a < k; ++a)
    for (Index b = 0; b < k; ++b) out(a, b) = m(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  return out;
}

double margin(const CommuteTimes& ct, Index x, const std::vector<std::vector<Index>>& class_sets) {
  // Classes are compared only through labeled nodes that x can reach; a class with no
  // reachable member does not compete.
  std::vector<double> times;
  std::vector<Index> reachable;
  for (const auto& set : class_sets) {
    reachable.clear();
    for (Index b : set)
      if (ct.component(b) == ct.component(x)) reachable.push_back(b);
    if (!reachable.empty()) times.push_back(ct.to_set(x, reachable));
  }
  if (times.size() < 2) return 0.0;
  std::partial_sort(times.begin(), times.begin() + 2, times.end());
  return times[1] - times[0];
}

std::size_t labeled_class_count(const std::vector<std::vector<Index>>& class_sets) {
  return static_cast<std::size_t>(
      std::count_if(class_sets.begin(), class_sets.end(), [](const auto& s) { return !s.empty(); }));
}

}  // namespace

double reliability(const Graph& g, std::span<const Index> subset, std::span<const Index> labeled,
                   double eps) {
  if (subset.empty()) return 0.0;
  for (Index s : subset)
    if (std::find(labeled.begin(), labeled.end(), s) != labeled.end())
      throw InvalidParameter("node " + std::to_string(s) + " is both selected and labeled");
  return reliability_of_covariance(FieldCovariance(g, labeled, eps).block(subset));
}

double discriminability(const CommuteTimes& ct, std::span<const Index> subset,
                        const std::vector<std::vector<Index>>& class_sets) {
  if (labeled_class_count(class_sets) < 2) {
    warn("discriminability: fewer than two classes have labeled nodes; margin is 0");
    return 0.0;
  }
  double total = 0.0;
  for (Index x : subset) total += margin(ct, x, class_sets);
  return total;
}

double discriminability(const Graph& g, std::span<const Index> subset,
                        const std::vector<std::vector<Index>>& class_sets) {
  return discriminability(CommuteTimes(g), subset, class_sets);
}

std::vector<Index> select_batch(const Graph& g, const CommuteTimes& ct, std::span<const Index> frontier,
                                std::span<const Index> labeled,
                                const std::vector<std::vector<Index>>& class_sets, Index s, double eps) {
  if (frontier.empty()) throw GraphError("empty frontier: the remaining unlabeled nodes are unreachable");
  if (s < 1 || s > static_cast<Index>(frontier.size()))
    throw InvalidParameter("batch size " + std::to_string(s) + " outside [1, " +
                           std::to_string(frontier.size()) + "]");
  const Matrix cov = FieldCovariance(g, labeled, eps).block(frontier);
  const bool two_classes = labeled_class_count(class_sets) >= 2;
  if (!two_classes) warn("select_batch: fewer than two labeled classes; discriminability ignored");
  const Index m = static_cast<Index>(frontier.size());
  Vector disc = Vector::Zero(m);
  if (two_classes)
    for (Index a = 0; a < m; ++a) disc[a] = margin(ct, frontier[static_cast<std::size_t>(a)], class_sets);

  std::vector<Index> chosen;  // positions into frontier
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  double current_r = 0.0;
  for (Index step = 0; step < s; ++step) {
    Index best = -1;
    double best_gain = 0.0;
    double best_r = 0.0;
    for (Index a = 0; a < m; ++a) {
      if (used[static_cast<std::size_t>(a)]) continue;
      chosen.push_back(a);
      const double r = reliability_of_covariance(sub_block(cov, chosen));
      chosen.pop_back();
      const double gain = (r - current_r) + disc[a];
      // gains equal up to rounding count as ties and keep the lower index
      if (best < 0 || gain > best_gain + 1e-12 * std::max(1.0, std::abs(best_gain))) {
        best = a;
        best_gain = gain;
        best_r = r;
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    chosen.push_back(best);
    current_r = best_r;
  }
  std::vector<Index> out;
  out.reserve(chosen.size());
  for (Index a : chosen) out.push_back(frontier[static_cast<std::size_t>(a)]);
  return out;
}

std::vector<Index> select_batch(const Graph& g, std::span<const Index> frontier,
                                std::span<const Index> labeled,
                                const std::vector<std::vector<Index>>& class_sets, Index s, double eps) {
  return select_batch(g, CommuteTimes(g), frontier, labeled, class_sets, s, eps);
}

const LabelMatrix& learner_step(const SparseMatrix& walk, CurriculumState& state,
                                std::span<const Index> batch) {
  for (Index b : batch)
    if (state.is_labeled(b)) throw InvalidParameter("node " + std::to_string(b) + " is already labeled");
  const Eigen::SparseMatrix<double, Eigen::RowMajor> p = walk;
  const LabelMatrix previous = state.scores;
  auto update = [&](Index i) {
    state.scores.row(i) = p.row(i) * previous;
  };
  for (Index i : state.selected) update(i);
  for (Index i : batch) update(i);
  for (Index i : batch) {
    Index best = 0;
    for (Index c = 1; c < state.scores.cols(); ++c)
      if (state.scores(i, c) > state.scores(i, best)) best = c;
    state.assigned[static_cast<std::size_t>(i)] = static_cast<int>(best);
    state.selected.push_back(i);
  }
  ++state.round;
  return state.scores;
}

double feedback(const Matrix& batch_scores, const TeacherConfig& cfg, Index s) {
  if (s < 1) throw InvalidParameter("batch size must be positive");
  if (batch_scores.cols() < 2) throw InvalidParameter("feedback needs at least two classes");
  const double excess =
      batch_scores.squaredNorm() - static_cast<double>(s) / static_cast<double>(batch_scores.cols());
  // 2 / (1 + exp(-u)) - 1 == tanh(u / 2)
  return std::tanh(0.5 * cfg.gamma_fb * excess);
}

TlltResult tllt_run(const Dataset& data, const Graph& g, const TeacherConfig& cfg) {
  cfg.validate();
  if (data.size() != g.size()) throw InvalidParameter("dataset and graph sizes differ");
  const auto sets = data.class_sets();
  if (labeled_class_count(sets) < 2) throw InvalidParameter("curriculum needs labels in at least two classes");

  TlltResult out;
  CurriculumState& state = out.state;
  state = CurriculumState::initialize(data);
  const SparseMatrix walk = random_walk_matrix(g);
  const CommuteTimes ct(g);
  const int c = data.num_classes();

  auto accuracy_so_far = [&]() -> std::optional<double> {
    if (!data.has_truth() || state.selected.empty()) return std::nullopt;
    std::size_t hits = 0;
    for (Index i : state.selected)
      hits += state.assigned[static_cast<std::size_t>(i)] == data.truth()[static_cast<std::size_t>(i)];
    return static_cast<double>(hits) / static_cast<double>(state.selected.size());
  };

  Index s = cfg.s_initial;
  while (true) {
    const auto unlabeled = state.unlabeled();
    if (unlabeled.empty()) break;
    const auto frontier = labeled_frontier(g, state);
    if (frontier.empty()) {
      warn("tllt: " + std::to_string(unlabeled.size()) +
           " nodes are unreachable from the labeled set; assigning the class of the nearest labeled sample");
      const auto labeled = state.labeled();
      CurriculumRound round;
      round.t = state.round + 1;
      round.fallback = true;
      for (Index i : unlabeled) {
        Index nearest = labeled.front();
        double best = (data.features().row(i) - data.features().row(nearest)).squaredNorm();
        for (Index l : labeled) {
          const double d = (data.features().row(i) - data.features().row(l)).squaredNorm();
          if (d < best) {
            best = d;
            nearest = l;
          }
        }
        const int cls = state.assigned[static_cast<std::size_t>(nearest)];
        state.assigned[static_cast<std::size_t>(i)] = cls;
        state.scores.row(i).setZero();
        state.scores(i, cls) = 1.0;
        state.selected.push_back(i);
        round.selected.push_back(i);
      }
      ++state.round;
      round.batch_size = static_cast<Index>(round.selected.size());
      round.accuracy_so_far = accuracy_so_far();
      state.history.push_back(std::move(round));
      break;
    }

    const Index batch_size = std::min<Index>(s, static_cast<Index>(frontier.size()));
    const auto batch = select_batch(g, ct, frontier, state.labeled(), state.class_sets(c), batch_size,
                                    cfg.epsilon_gmrf);
    learner_step(walk, state, batch);

    Matrix batch_scores(static_cast<Index>(batch.size()), c);
    for (std::size_t r = 0; r < batch.size(); ++r) batch_scores.row(static_cast<Index>(r)) = state.scores.row(batch[r]);
    const double fb = feedback(batch_scores, cfg, batch_size);

    CurriculumRound round;
    round.t = state.round;
    round.selected = batch;
    round.batch_size = batch_size;
    round.feedback = fb;
    round.accuracy_so_far = accuracy_so_far();
    state.history.push_back(std::move(round));

    const double b = static_cast<double>(labeled_frontier(g, state).size());
    s = std::max<Index>(1, static_cast<Index>(std::ceil(b * std::max(fb, 0.0))));
  }

  out.result = make_result(state.scores, state.round, true);
  return out;
}

std::string history_jsonl(const std::vector<CurriculumRound>& history) {
  std::string out;
  for (const auto& r : history) {
    nlohmann::json rec;
    rec["t"] = r.t;
    rec["S_t"] = r.selected;
    rec["s_t"] = r.batch_size;
    rec["g_t"] = r.feedback;
    if (r.accuracy_so_far) rec["accuracy_so_far"] = *r.accuracy_so_far;
    if (r.fallback) rec["fallback"] = true;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

}  // namespace gssl
