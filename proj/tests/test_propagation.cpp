#include "gssl/error.hpp"
#include "gssl/propagation.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>

using namespace gssl;

namespace {

Graph pair_graph() { return Graph::from_edges(2, {{0, 1, 1.0}}); }

LabelMatrix column(std::initializer_list<double> v) {
  LabelMatrix y(static_cast<Index>(v.size()), 1);
  Index i = 0;
  for (double x : v) y(i++, 0) = x;
  return y;
}

Dataset line_data(std::vector<double> xs, std::vector<Label> labels, int c = 2) {
  Matrix x(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) x(static_cast<Index>(i), 0) = xs[i];
  return Dataset(x, std::move(labels), c);
}

Dataset random_dataset(Index n, std::uint64_t seed, int labeled_per_class = 2) {
  Rng rng(seed);
  Matrix x(n, 2);
  for (Index i = 0; i < n; ++i) x.row(i) << rng.normal(), rng.normal();
  std::vector<Label> labels(static_cast<std::size_t>(n));
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < labeled_per_class; ++j) labels[static_cast<std::size_t>(c * labeled_per_class + j)] = c;
  return Dataset(x, labels, 2);
}

}  // namespace

TEST_CASE("lgc closed form") {
  const auto r = lgc_closed(pair_graph(), column({1.0, 0.0}), 0.5);
  CHECK(r.scores(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(r.scores(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r.converged);
  CHECK(r.iterations == 0);

  const auto zero = lgc_closed(pair_graph(), LabelMatrix::Zero(2, 2), 0.5);
  CHECK(zero.scores.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(lgc_closed(pair_graph(), column({1.0, 0.0}), 1.0), InvalidParameter);
  CHECK_THROWS_AS(lgc_closed(pair_graph(), column({1.0, 0.0, 0.0}), 0.5), InvalidParameter);
}

TEST_CASE("lgc matches a dense oracle and is permutation equivariant") {
  const Matrix w = oracle::random_connected_weights(9, 0.3, 42);
  LabelMatrix y = LabelMatrix::Zero(9, 3);
  y(0, 0) = y(4, 1) = y(7, 2) = 1.0;
  const auto r = lgc_closed(Graph::from_dense(w), y, 0.8);
  CHECK((r.scores - oracle::dense_lgc(w, y, 0.8)).cwiseAbs().maxCoeff() <= 1e-12);

  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[2], perm[5]);
  Eigen::PermutationMatrix<Eigen::Dynamic> p(9);
  for (int i = 0; i < 9; ++i) p.indices()[i] = perm[static_cast<std::size_t>(i)];
  const Matrix wp = p * w * p.transpose();
  const auto rp = lgc_closed(Graph::from_dense(wp), p * y, 0.8);
  CHECK((rp.scores - p * r.scores).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("lgc iteration") {
  PropagationConfig cfg{0.5, 1e-10, 10000};
  const auto r = lgc_iterate(pair_graph(), column({1.0, 0.0}), cfg);
  CHECK(r.converged);
  CHECK(std::abs(r.scores(0, 0) - 2.0 / 3.0) <= 1e-9);
  CHECK(std::abs(r.scores(1, 0) - 1.0 / 3.0) <= 1e-9);

  cfg.alpha = 1e-9;
  const LabelMatrix y = column({0.3, 0.7});
  CHECK((lgc_iterate(pair_graph(), y, cfg).scores - y).cwiseAbs().maxCoeff() <= 1e-8);

  SUBCASE("iteration cap reports non-convergence") {
    const PropagationConfig tight{0.99, 1e-14, 3};
    const auto capped = lgc_iterate(pair_graph(), column({1.0, 0.0}), tight);
    CHECK_FALSE(capped.converged);
    CHECK(capped.iterations == 3);
  }
  SUBCASE("config validation") {
    CHECK_THROWS_AS(lgc_iterate(pair_graph(), y, PropagationConfig{0.5, 0.0, 10}), InvalidParameter);
    CHECK_THROWS_AS(lgc_iterate(pair_graph(), y, PropagationConfig{0.5, 1e-8, 0}), InvalidParameter);
  }
}

TEST_CASE("lgc iteration update norm contracts") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix w = oracle::random_connected_weights(15, 0.25, seed);
    const Matrix s = normalized_smoother(Graph::from_dense(w));
    LabelMatrix y = LabelMatrix::Zero(15, 2);
    y(0, 0) = y(1, 1) = 1.0;
    LabelMatrix f = y;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
      const LabelMatrix next = 0.9 * s * f + 0.1 * y;
      const double upd = (next - f).norm();
      CHECK(upd <= prev * (1.0 + 1e-12));
      prev = upd;
      f = next;
    }
    PropagationConfig cfg{0.9, 1e-12, 100000};
    CHECK((lgc_iterate(Graph::from_dense(w), y, cfg).scores - lgc_closed(Graph::from_dense(w), y, 0.9).scores)
              .cwiseAbs()
              .maxCoeff() <= 1e-10);
  }
}

TEST_CASE("gfhf") {
  SUBCASE("single source") {
    const auto r = gfhf(pair_graph(), line_data({0.0, 1.0}, {0, Label{}}));
    CHECK(r.scores(1, 0) == doctest::Approx(1.0));
    CHECK(r.scores(1, 1) == doctest::Approx(0.0));
  }
  SUBCASE("path midpoint") {
    const Graph g = Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto r = gfhf(g, line_data({0.0, 1.0, 2.0}, {0, Label{}, 1}));
    CHECK(r.scores(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.scores(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r.scores(0, 0) == 1.0);
    CHECK(r.scores(2, 1) == 1.0);
  }
  SUBCASE("unlabeled component is reported") {
    const Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const auto data = line_data({0, 1, 2, 3}, {0, 1, Label{}, Label{}});
    CHECK_THROWS_AS(gfhf(g, data), GraphError);
    try {
      gfhf(g, data);
    } catch (const GraphError& e) {
      CHECK(std::string(e.what()).find("component 1") != std::string::npos);
    }
  }
}

TEST_CASE("gfhf matches absorbing-chain oracle and the maximum principle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix w = oracle::random_connected_weights(5 + static_cast<Index>(seed % 4), 0.4, seed);
    const Index n = w.rows();
    std::vector<Label> labels(static_cast<std::size_t>(n));
    labels[0] = 0;
    labels[1] = 1;
    Matrix x = Matrix::Zero(n, 1);
    const Dataset data(x, labels, 2);
    const auto r = gfhf(Graph::from_dense(w), data);

    // absorption probabilities by running the absorbing chain to stationarity
    const Matrix p = oracle::walk_matrix(w);
    Matrix f = Matrix::Zero(n, 2);
    f(0, 0) = f(1, 1) = 1.0;
    for (int it = 0; it < 20000; ++it) {
      Matrix next = p * f;
      next.row(0) << 1.0, 0.0;
      next.row(1) << 0.0, 1.0;
      f = next;
    }
    CHECK((r.scores - f).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(r.scores.minCoeff() >= 0.0);
    CHECK(r.scores.maxCoeff() <= 1.0 + 1e-12);
    CHECK((r.scores.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("fick diffusion matrix") {
  SUBCASE("two nodes") {
    const auto data = line_data({0.0, 3.0}, {0, 1});
    for (double gamma : {0.1, 1.0, 7.0}) {
      const Matrix p = fick_diffusion_matrix(data, pair_graph(), gamma);
      CHECK(p(0, 1) == 1.0);
      CHECK(p(1, 0) == 1.0);
      CHECK(p(0, 0) == 0.0);
    }
  }
  SUBCASE("path with unequal distances") {
    const Graph g = Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const auto data = line_data({0.0, 1.0, 3.0}, {0, Label{}, 1});
    const Matrix p = fick_diffusion_matrix(data, g, 1.0);
    CHECK(p(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(p(1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(p(0, 2) == 0.0);
  }
  SUBCASE("gamma invariance and stochasticity") {
    const auto data = random_dataset(30, 4);
    const Graph g = build_knn_graph(data, 5);
    const Matrix a = fick_diffusion_matrix(data, g, 1.0);
    const Matrix b = fick_diffusion_matrix(data, g, 123.0);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((a.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(a.minCoeff() >= 0.0);
    const Matrix w = g.weights();
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 30; ++j)
        if (w(i, j) == 0.0) CHECK(a(i, j) == 0.0);
  }
  SUBCASE("duplicate points are clamped, not divided by zero") {
    const auto data = line_data({1.0, 1.0, 2.0}, {0, Label{}, 1});
    const Graph g = Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const Matrix p = fick_diffusion_matrix(data, g, 1.0);
    CHECK(p.allFinite());
    CHECK(p(1, 0) > 0.999);
  }
  CHECK_THROWS_AS(fick_diffusion_matrix(line_data({0, 1}, {0, 1}), pair_graph(), 0.0), InvalidParameter);
}

TEST_CASE("flap") {
  SUBCASE("two nodes") {
    const auto p = fick_diffusion_matrix(line_data({0, 1}, {0, 1}), pair_graph(), 1.0);
    const auto r = flap_closed(p, column({1.0, 0.0}), 0.5);
    CHECK(r.scores(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(r.scores(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(flap_closed(p, column({0.0, 0.0}), 0.5).scores.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("positive seeds give positive scores") {
    const auto data = random_dataset(25, 8);
    const Graph g = build_knn_graph(data, 4);
    const SparseMatrix p = fick_diffusion_matrix(data, g, 1.0);
    const auto r = flap_closed(p, LabelMatrix::Ones(25, 1), 0.9);
    CHECK(r.scores.minCoeff() > 0.0);
  }
  SUBCASE("closed and iterative agree") {
    const auto data = random_dataset(40, 13);
    const Graph g = build_knn_graph(data, 6);
    const auto closed = flap_closed(g, data, 0.9, 1.0);
    const auto iter = flap_iterate(g, data, PropagationConfig{0.9, 1e-10, 100000}, 1.0);
    CHECK(iter.converged);
    CHECK((closed.scores - iter.scores).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(closed.predicted == iter.predicted);
  }
}

TEST_CASE("neumann series equivalence") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Matrix w = oracle::random_connected_weights(20 + static_cast<Index>(seed) * 5, 0.2, seed);
    const Matrix p = random_walk_matrix(Graph::from_dense(w));
    for (double alpha : {0.3, 0.5, 0.9}) {
      const Index n = p.rows();
      const Matrix inv = (Matrix::Identity(n, n) - alpha * p).inverse();
      const Matrix sum = oracle::neumann_partial_sum(p, alpha, oracle::neumann_terms(alpha));
      CHECK((sum - inv).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("argmax is invariant to positive seed scaling") {
  const auto data = random_dataset(50, 21, 3);
  const Graph g = build_knn_graph(data, 6);
  const LabelMatrix y = one_hot_seeds(data);
  CHECK(lgc_closed(g, y, 0.9).predicted == lgc_closed(g, 17.5 * y, 0.9).predicted);
  const SparseMatrix p = fick_diffusion_matrix(data, g, 1.0);
  CHECK(flap_closed(p, y, 0.9).predicted == flap_closed(p, 0.01 * y, 0.9).predicted);
}

TEST_CASE("row argmax breaks ties toward the lowest class") {
  LabelMatrix s(3, 3);
  s << 1, 1, 0, 0, 2, 2, 3, 3, 3;
  CHECK(row_argmax(s) == std::vector<int>{0, 1, 0});
}
