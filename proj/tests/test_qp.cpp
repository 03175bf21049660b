#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "plc/qp.hpp"

using plc::Matrix;
using plc::SimplexBoxQP;
using plc::Vector;

TEST_CASE("zero gram, zero linear: any feasible point has objective 0") {
  SimplexBoxQP p;
  p.gram = Matrix::Zero(2, 2);
  p.linear = Vector::Zero(2);
  p.upper = Vector::Ones(2);
  const Vector w = plc::solve_simplex_box_qp(p);
  CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
  CHECK(w.minCoeff() >= -1e-12);
  CHECK((w - p.upper).maxCoeff() <= 1e-12);
  CHECK(plc::qp_objective(p, w) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("identity gram: symmetry forces the midpoint") {
  SimplexBoxQP p;
  p.gram = Matrix::Identity(2, 2);
  p.linear = Vector::Zero(2);
  p.upper = Vector::Ones(2);
  const Vector w = plc::solve_simplex_box_qp(p);
  CHECK(w[0] == Catch::Approx(0.5).margin(1e-9));
  CHECK(w[1] == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("infeasible bounds are rejected") {
  SimplexBoxQP p;
  p.gram = Matrix::Identity(3, 3);
  p.linear = Vector::Zero(3);
  p.upper = Vector::Constant(3, 0.2);  // sum = 0.6 < 1
  CHECK_THROWS_AS(plc::solve_simplex_box_qp(p), std::runtime_error);
}

TEST_CASE("non-symmetric gram is rejected") {
  SimplexBoxQP p;
  p.gram = Matrix::Zero(2, 2);
  p.gram(0, 1) = 1.0;
  p.linear = Vector::Zero(2);
  p.upper = Vector::Ones(2);
  CHECK_THROWS_AS(plc::solve_simplex_box_qp(p), std::invalid_argument);
}

TEST_CASE("projection lands on the capped simplex") {
  plc::Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(rng.index(7));
    const Vector v = oracle::random_vector(k, rng, 3.0);
    Vector u(k);
    for (int i = 0; i < k; ++i) u[i] = 0.3 + 0.7 * rng.uniform();
    if (u.sum() < 1.0) continue;
    const Vector w = plc::project_capped_simplex(v, u);
    REQUIRE(std::abs(w.sum() - 1.0) <= 1e-9);
    REQUIRE(w.minCoeff() >= -1e-12);
    REQUIRE((w - u).maxCoeff() <= 1e-12);
  }
}

TEST_CASE("randomized instances: feasibility and oracle-matching objective") {
  plc::Rng rng(42);
  for (int trial = 0; trial < 220; ++trial) {
    const int k = 2 + static_cast<int>(rng.index(7));  // k in [2, 8]
    SimplexBoxQP p;
    p.gram = oracle::random_psd(k, rng);
    p.linear = oracle::random_vector(k, rng);
    if (trial % 3 == 0) {
      p.upper = Vector::Ones(k);
    } else {
      p.upper = Vector::Zero(k);
      do {
        for (int i = 0; i < k; ++i) p.upper[i] = 0.2 + 0.8 * rng.uniform();
      } while (p.upper.sum() < 1.05);
    }
    const Vector w = plc::solve_simplex_box_qp(p);

    REQUIRE(std::abs(w.sum() - 1.0) <= 1e-9);
    REQUIRE(w.minCoeff() >= -1e-12);
    REQUIRE((w - p.upper).maxCoeff() <= 1e-12);

    const Vector wo = oracle::pg_qp(p.gram, p.linear, p.upper);
    REQUIRE(plc::qp_objective(p, w) <= plc::qp_objective(p, wo) + 1e-6);
  }
}

TEST_CASE("tight upper bounds force the unique feasible point") {
  SimplexBoxQP p;
  p.gram = Matrix::Identity(3, 3);
  p.linear = Vector::Zero(3);
  p.upper = Vector::Constant(3, 1.0 / 3.0);  // sum exactly 1
  const Vector w = plc::solve_simplex_box_qp(p);
  for (int i = 0; i < 3; ++i) CHECK(w[i] == Catch::Approx(1.0 / 3.0).margin(1e-9));
}

TEST_CASE("strong linear pull saturates one coordinate") {
  SimplexBoxQP p;
  p.gram = 0.01 * Matrix::Identity(3, 3);
  p.linear = Vector::Zero(3);
  p.linear[1] = -100.0;
  p.upper = Vector::Ones(3);
  const Vector w = plc::solve_simplex_box_qp(p);
  CHECK(w[1] == Catch::Approx(1.0).margin(1e-9));
}
