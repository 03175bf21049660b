#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "plc/disambiguation.hpp"
#include "plc/graph.hpp"

using plc::Matrix;
using plc::Vector;

namespace {

// Projected-gradient oracle for the whole nq-variable problem of one sweep's
// objective ||F - W'F||_F^2 with per-row capped-simplex constraints.
Matrix pg_confidence(const Matrix& W, const Matrix& Y, Matrix F, long iters) {
  const Matrix T = (Matrix::Identity(W.rows(), W.rows()) - W) *
                   (Matrix::Identity(W.rows(), W.rows()) - W).transpose();
  const double step = 1.0 / (2.0 * T.cwiseAbs().sum() + 1.0);
  for (long it = 0; it < iters; ++it) {
    const Matrix grad = 2.0 * T * F;
    const Matrix cand = F - step * grad;
    for (int i = 0; i < F.rows(); ++i) {
      F.row(i) =
          oracle::project_box_simplex(cand.row(i).transpose(), Y.row(i).transpose()).transpose();
    }
  }
  return F;
}

void check_rows(const Matrix& F, const Matrix& Y) {
  for (int i = 0; i < F.rows(); ++i) {
    REQUIRE(std::abs(F.row(i).sum() - 1.0) <= 1e-8);
    REQUIRE(F.row(i).minCoeff() >= -1e-12);
    REQUIRE((F.row(i) - Y.row(i)).maxCoeff() <= 1e-12);
  }
}

}  // namespace

TEST_CASE("init_confidence: uniform over candidates") {
  Matrix y(3, 4);
  y << 1, 0, 1, 0, 0, 1, 0, 0, 1, 1, 1, 1;
  const Matrix f = plc::init_confidence(y);
  CHECK(f(0, 0) == Catch::Approx(0.5));
  CHECK(f(0, 2) == Catch::Approx(0.5));
  CHECK(f(0, 1) == 0.0);
  CHECK(f(1, 1) == Catch::Approx(1.0));
  for (int j = 0; j < 4; ++j) CHECK(f(2, j) == Catch::Approx(0.25));
}

TEST_CASE("init_confidence: empty candidate row rejected") {
  Matrix y = Matrix::Zero(2, 3);
  y(0, 1) = 1.0;
  CHECK_THROWS_AS(plc::init_confidence(y), std::invalid_argument);
}

TEST_CASE("update_confidence: singleton candidate sets pin F to Y") {
  // Two mutually reconstructing points with disjoint singleton candidates.
  Matrix w(2, 2);
  w << 0.0, 1.0, 1.0, 0.0;
  Matrix y(2, 2);
  y << 1, 0, 0, 1;
  const Matrix f = plc::update_confidence(w, y, plc::init_confidence(y));
  CHECK(f(0, 0) == Catch::Approx(1.0).margin(1e-9));
  CHECK(f(1, 1) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("update_confidence: objective non-increasing, matches whole-problem oracle") {
  plc::Rng rng(8);
  // 5-point chain, q = 3.
  Matrix x(5, 1);
  x << 0.0, 1.0, 2.0, 3.0, 4.0;
  const auto g = plc::init_weights(x, plc::build_knn(x, 2));
  Matrix y(5, 3);
  y << 1, 1, 0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1;
  const Matrix f0 = plc::init_confidence(y);

  const double before = plc::disambiguation_objective(g.W, f0);
  const Matrix f1 = plc::update_confidence(g.W, y, f0);
  const double after = plc::disambiguation_objective(g.W, f1);
  CHECK(after <= before + 1e-9);
  check_rows(f1, y);

  // Run a few more sweeps to approach the joint optimum, then compare with
  // the projected-gradient oracle on the full problem.
  Matrix f = f1;
  for (int sweep = 0; sweep < 200; ++sweep) f = plc::update_confidence(g.W, y, f);
  const Matrix fo = pg_confidence(g.W, y, f0, 20000);
  CHECK(plc::disambiguation_objective(g.W, f) <=
        plc::disambiguation_objective(g.W, fo) + 1e-5);
}

TEST_CASE("direct objective equals the quadratic form with T = (I-W)(I-W)'") {
  plc::Rng rng(4);
  const Matrix x = oracle::random_matrix(9, 2, rng);
  const auto g = plc::init_weights(x, plc::build_knn(x, 3));
  Matrix f(9, 4);
  for (int i = 0; i < 9; ++i) {
    Vector row = oracle::random_vector(4, rng).cwiseAbs();
    f.row(i) = row / row.sum();
  }
  const Matrix T = plc::confidence_quadratic(g.W);
  double quad = 0.0;
  for (int i = 0; i < 9; ++i) {
    for (int j = 0; j < 9; ++j) quad += T(i, j) * f.row(i).dot(f.row(j));
  }
  CHECK(plc::disambiguation_objective(g.W, f) == Catch::Approx(quad).margin(1e-8));
}

TEST_CASE("update_confidence: self-loop weights leave a zero objective") {
  const Matrix w = Matrix::Identity(3, 3);
  Matrix y(3, 2);
  y << 1, 1, 1, 0, 0, 1;
  const Matrix f0 = plc::init_confidence(y);
  CHECK(plc::disambiguation_objective(w, f0) == Catch::Approx(0.0).margin(1e-12));
  const Matrix f1 = plc::update_confidence(w, y, f0);
  CHECK(plc::disambiguation_objective(w, f1) == Catch::Approx(0.0).margin(1e-12));
  check_rows(f1, y);
}

TEST_CASE("pseudo_labels: argmax with lowest-index ties") {
  Matrix f(3, 3);
  f << 0.5, 0.0, 0.5, 0.2, 0.7, 0.1, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const auto labels = plc::pseudo_labels(f);
  CHECK(labels == std::vector<int>{0, 1, 0});
}
