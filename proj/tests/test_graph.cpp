#include "gssl/error.hpp"
#include "gssl/graph.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace gssl;

namespace {

Graph path3() { return Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

Matrix line_points(std::initializer_list<double> xs) {
  Matrix m(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("knn graph: identical points share a unit edge") {
  const Graph g = build_knn_graph(line_points({3.0, 3.0}), 1, 1.0);
  CHECK(g.weight(0, 1) == 1.0);
  CHECK(g.weights().nonZeros() == 2);
}

TEST_CASE("knn graph: collinear points get Gaussian weights") {
  const Graph g = build_knn_graph(line_points({0.0, 1.0, 2.0}), 2, 1.0);
  CHECK(g.weight(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(g.weight(1, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(g.weight(0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(g.weight(0, 0) == 0.0);
}

TEST_CASE("knn graph: union symmetrization") {
  // 0 and 1 are mutual neighbours; 2 is far and picks 1, which does not pick 2.
  const Graph g = build_knn_graph(line_points({0.0, 0.1, 5.0}), 1, 1.0);
  CHECK(g.weight(0, 1) > 0.0);
  CHECK(g.weight(1, 2) > 0.0);
  CHECK(g.weight(0, 2) == 0.0);
}

TEST_CASE("knn graph: constraints") {
  Matrix x(4, 1);
  x << 0.0, 0.2, 10.0, 10.2;
  Dataset data(x, {0, Label{}, 0, 1}, 2);

  SUBCASE("must-link forces weight 1 even between distant points") {
    GraphConstraints c;
    c.must_link = {{0, 2}};
    const Graph g = build_knn_graph(data, 1, 1.0, c);
    CHECK(g.weight(0, 2) == 1.0);
    CHECK(g.weight(2, 0) == 1.0);
  }
  SUBCASE("cannot-link removes an edge") {
    GraphConstraints c;
    c.cannot_link = {{2, 3}};
    c.must_link = {{0, 2}};
    CHECK_THROWS_AS(build_knn_graph(data, 1, 1.0, c), GraphError);  // node 3 isolated
    try {
      build_knn_graph(data, 1, 1.0, c);
    } catch (const GraphError& e) {
      CHECK(std::string(e.what()).find("node 3") != std::string::npos);
    }
  }
  SUBCASE("constraint on an unlabeled sample is rejected") {
    GraphConstraints c;
    c.must_link = {{0, 1}};
    CHECK_THROWS_AS(build_knn_graph(data, 1, 1.0, c), InvalidParameter);
  }
  SUBCASE("constraints from labels") {
    const auto c = constraints_from_labels(data);
    REQUIRE(c.must_link.size() == 1);
    CHECK(c.must_link[0] == std::pair<Index, Index>{0, 2});
    CHECK(c.cannot_link.size() == 2);
  }
}

TEST_CASE("knn graph: parameter errors") {
  const Matrix x = line_points({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(build_knn_graph(x, 3, 1.0), InvalidParameter);
  CHECK_THROWS_AS(build_knn_graph(x, 0, 1.0), InvalidParameter);
  CHECK_THROWS_AS(build_knn_graph(x, 1, -1.0), InvalidParameter);
}

TEST_CASE("auto sigma is the mean k-th neighbour distance") {
  const Matrix x = line_points({0.0, 1.0, 3.0});
  // 1st neighbours: 1, 1, 2
  CHECK(auto_sigma(x, 1) == doctest::Approx(4.0 / 3.0));
  const Graph g = build_knn_graph(x, 1);
  CHECK(g.weight(0, 1) == doctest::Approx(std::exp(-1.0 / (2.0 * 16.0 / 9.0))));
}

TEST_CASE("graph invariants on random data") {
  Rng rng(11);
  Matrix x(40, 3);
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
  const Graph g = build_knn_graph(x, 5, 1.0);
  const Matrix w = g.weights();
  CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(w.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((w.rowwise().sum() - g.degrees()).cwiseAbs().maxCoeff() <= 1e-12 * g.degrees().maxCoeff());
  CHECK(g.volume() == doctest::Approx(g.degrees().sum()).epsilon(1e-12));

  // strictly decreasing weight in distance for a fixed sigma
  for (Index i = 0; i < 5; ++i) {
    const auto nb = g.neighbors(i);
    for (Index a : nb)
      for (Index b : nb) {
        const double da = (x.row(i) - x.row(a)).norm();
        const double db = (x.row(i) - x.row(b)).norm();
        if (da < db) CHECK(g.weight(i, a) > g.weight(i, b));
      }
  }
}

TEST_CASE("graph construction rejects invalid weights") {
  Matrix w = Matrix::Zero(3, 3);
  w(0, 1) = w(1, 0) = 1.0;
  CHECK_THROWS_AS(Graph::from_dense(w), GraphError);  // node 2 isolated
  w(1, 2) = 1.0;
  w(2, 1) = 0.5;
  CHECK_THROWS_AS(Graph::from_dense(w), GraphError);  // asymmetric
  w(2, 1) = 1.0;
  w(0, 0) = 1.0;
  CHECK_THROWS_AS(Graph::from_dense(w), GraphError);  // self-loop
  w(0, 0) = 0.0;
  w(0, 1) = w(1, 0) = -1.0;
  CHECK_THROWS_AS(Graph::from_dense(w), GraphError);
}

TEST_CASE("laplacian") {
  const Graph two = Graph::from_edges(2, {{0, 1, 1.0}});
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK(Matrix(laplacian(two)) == expected);

  const Matrix w = oracle::random_connected_weights(6, 0.4, 3);
  const Graph g = Graph::from_dense(w);
  const Matrix l = laplacian(g);
  CHECK((l * Vector::Ones(6)).cwiseAbs().maxCoeff() <= 1e-14);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(l);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix wr = oracle::random_connected_weights(8, 0.3, 100 + static_cast<std::uint64_t>(trial));
    const Matrix lr = laplacian(Graph::from_dense(wr));
    Vector v(8);
    for (Index i = 0; i < 8; ++i) v[i] = rng.normal();
    CHECK(v.dot(lr * v) >= -1e-10);
  }
}

TEST_CASE("normalized smoother") {
  const Graph two = Graph::from_edges(2, {{0, 1, 1.0}});
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK(Matrix(normalized_smoother(two)) == expected);

  const Graph star = Graph::from_edges(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  const Matrix s = normalized_smoother(star);
  for (Index leaf = 1; leaf < 4; ++leaf) CHECK(s(0, leaf) == doctest::Approx(1.0 / std::sqrt(3.0)));

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix sr = normalized_smoother(Graph::from_dense(oracle::random_connected_weights(10, 0.3, seed)));
    CHECK((sr - sr.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sr);
    CHECK(eig.eigenvalues().minCoeff() >= -1.0 - 1e-12);
    CHECK(eig.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("random walk matrix") {
  const Graph two = Graph::from_edges(2, {{0, 1, 1.0}});
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK(Matrix(random_walk_matrix(two)) == expected);

  const Matrix p = random_walk_matrix(path3());
  CHECK(p(1, 0) == 0.5);
  CHECK(p(1, 1) == 0.0);
  CHECK(p(1, 2) == 0.5);

  const Matrix pr = random_walk_matrix(Graph::from_dense(oracle::random_connected_weights(12, 0.3, 9)));
  CHECK((pr.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(pr.minCoeff() >= 0.0);
}

TEST_CASE("commute time") {
  CHECK(commute_time(Graph::from_edges(2, {{0, 1, 1.0}}), 0, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(commute_time(path3(), 0, 2) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(commute_time(path3(), 0, 2) == doctest::Approx(oracle::brute_commute(Matrix(path3().weights()), 0, 2)));

  const Graph tri = Graph::from_edges(3, {{0, 1, 0.7}, {1, 2, 0.7}, {0, 2, 0.7}});
  const CommuteTimes ct(tri);
  CHECK(ct(0, 1) == doctest::Approx(ct(1, 2)).epsilon(1e-12));
  CHECK(ct(0, 1) == doctest::Approx(ct(0, 2)).epsilon(1e-12));
  CHECK(ct(1, 1) == 0.0);
  CHECK(ct(0, 2) == doctest::Approx(ct(2, 0)).epsilon(1e-14));

  const Graph split = Graph::from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK_THROWS_AS(commute_time(split, 0, 2), GraphError);
  // within a component the walk only sees that component's volume
  CHECK(commute_time(split, 2, 3) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("commute time to a set") {
  const Graph g = path3();
  const CommuteTimes ct(g);
  const std::vector<Index> self{0};
  const std::vector<Index> one{2};
  const std::vector<Index> two{1, 2};
  CHECK(commute_time_to_set(g, 0, self) == 0.0);
  CHECK(ct.to_set(0, one) == doctest::Approx(ct(0, 2)));
  CHECK(ct.to_set(0, two) == doctest::Approx((ct(0, 1) + ct(0, 2)) / 2.0));
  CHECK_THROWS_AS(ct.to_set(0, std::vector<Index>{}), InvalidParameter);
}

TEST_CASE("commute time matches hitting-time oracle on small random graphs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 3 + static_cast<Index>(seed % 4);
    const Matrix w = oracle::random_connected_weights(n, 0.5, seed);
    const CommuteTimes ct(Graph::from_dense(w));
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double ref = oracle::brute_commute(w, i, j);
        CHECK(std::abs(ct(i, j) - ref) <= 1e-8 * ref);
      }
  }
}
