#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fgw/ot.hpp"
#include "test_util.hpp"

using namespace fgw;

TEST_CASE("feature_cost_matrix") {
  Matrix F0(1, 1), F3(1, 1);
  F0 << 0;
  F3 << 3;
  CHECK(feature_cost_matrix(F0, F0)(0, 0) == 0.0);
  CHECK(feature_cost_matrix(F0, F3)(0, 0) == doctest::Approx(9.0));

  SUBCASE("expansion identity on random features") {
    Rng rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Matrix F1(4, 3), F2(5, 3);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 3; ++k) F1(i, k) = unif(rng);
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k < 3; ++k) F2(j, k) = unif(rng);
    Matrix M = feature_cost_matrix(F1, F2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 5; ++j) {
        double expect = F1.row(i).squaredNorm() + F2.row(j).squaredNorm() -
                        2.0 * F1.row(i).dot(F2.row(j));
        CHECK(M(i, j) == doctest::Approx(std::max(expect, 0.0)).epsilon(1e-12));
      }
  }
  SUBCASE("argument swap transposes") {
    Rng rng(6);
    Matrix F1 = testutil::random_relaxed(3, 2, rng).F;
    Matrix F2 = testutil::random_relaxed(4, 2, rng).F;
    CHECK((feature_cost_matrix(F1, F2) -
           feature_cost_matrix(F2, F1).transpose())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(feature_cost_matrix(Matrix::Zero(1, 1), Matrix::Zero(1, 2)),
                    Error);
  }
}

TEST_CASE("solve_exact basics") {
  SUBCASE("1x1") {
    Matrix c(1, 1);
    c << 4.2;
    OtSolution sol = solve_exact(c);
    CHECK(sol.plan.pi(0, 0) == doctest::Approx(1.0));
    CHECK(sol.value == doctest::Approx(4.2));
  }
  SUBCASE("zero-cost matching") {
    Matrix c(2, 2);
    c << 0, 1, 1, 0;
    OtSolution sol = solve_exact(c);
    CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol.plan.pi(0, 0) == doctest::Approx(0.5));
    CHECK(sol.plan.pi(1, 1) == doctest::Approx(0.5));
  }
  SUBCASE("non-finite cost rejected") {
    Matrix c(1, 1);
    c << std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_exact(c), Error);
  }
}

TEST_CASE("solve_exact matches exhaustive vertex enumeration") {
  Rng rng(42);
  std::uniform_int_distribution<int> size_dist(1, 4);
  std::uniform_int_distribution<int> cost_dist(-9, 9);
  for (int trial = 0; trial < 60; ++trial) {
    int n1 = size_dist(rng), n2 = size_dist(rng);
    Matrix c(n1, n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) c(i, j) = cost_dist(rng);
    OtSolution sol = solve_exact(c);
    double oracle = testutil::brute_force_ot_value(c);
    CHECK(sol.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(sol.plan.marginal_violation() < 1e-10);
    // Vertex: at most n1+n2-1 nonzeros.
    int nnz = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        if (sol.plan.pi(i, j) > 0.0) ++nnz;
    CHECK(nnz <= n1 + n2 - 1);
  }
}

TEST_CASE("solve_exact optimality against random feasible plans") {
  Rng rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix c(6, 5);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 5; ++j) c(i, j) = unif(rng);
  OtSolution sol = solve_exact(c);
  for (int trial = 0; trial < 1000; ++trial) {
    TransportPlan feas = random_plan(6, 5, rng);
    double val = (c.array() * feas.pi.array()).sum();
    CHECK(sol.value <= val + 1e-9);
  }
}

TEST_CASE("solve_exact LP duality at small sizes") {
  // Recover potentials from complementary slackness on the optimal support
  // and check the dual value and dual feasibility.
  Rng rng(13);
  std::uniform_real_distribution<double> unif(0.0, 5.0);
  for (int trial = 0; trial < 25; ++trial) {
    int n1 = 3, n2 = 4;
    Matrix c(n1, n2);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) c(i, j) = unif(rng);
    OtSolution sol = solve_exact(c);

    // Solve u_i + v_j = c_ij on the support via least squares.
    std::vector<std::pair<int, int>> support;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        if (sol.plan.pi(i, j) > 1e-12) support.emplace_back(i, j);
    Matrix A = Matrix::Zero(static_cast<int>(support.size()) + 1, n1 + n2);
    Vector rhs = Vector::Zero(static_cast<int>(support.size()) + 1);
    for (size_t r = 0; r < support.size(); ++r) {
      A(static_cast<int>(r), support[r].first) = 1.0;
      A(static_cast<int>(r), n1 + support[r].second) = 1.0;
      rhs(static_cast<int>(r)) = c(support[r].first, support[r].second);
    }
    A(static_cast<int>(support.size()), 0) = 1.0;  // pin u_0 = 0
    Vector uv = A.colPivHouseholderQr().solve(rhs);
    double dual = uv.head(n1).sum() / n1 + uv.tail(n2).sum() / n2;
    CHECK(dual == doctest::Approx(sol.value).epsilon(1e-9));
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        CHECK(uv(i) + uv(n1 + j) <= c(i, j) + 1e-8);
  }
}

TEST_CASE("solve_exact permutation equivariance") {
  Rng rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix c(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = unif(rng);
  OtSolution base = solve_exact(c);
  std::vector<int> perm = {2, 0, 3, 1};
  Matrix cp(4, 3);
  for (int i = 0; i < 4; ++i) cp.row(perm[i]) = c.row(i);
  OtSolution permuted = solve_exact(cp);
  CHECK(permuted.value == doctest::Approx(base.value).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    CHECK((permuted.plan.pi.row(perm[i]) - base.plan.pi.row(i))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
}

TEST_CASE("solve_sinkhorn") {
  SUBCASE("uniform optimum on zero cost") {
    SinkhornSolution sol = solve_sinkhorn(Matrix::Zero(2, 2), 0.1);
    CHECK((sol.plan.pi.array() - 0.25).abs().maxCoeff() < 1e-8);
  }
  SUBCASE("1x1 regardless of epsilon") {
    Matrix c(1, 1);
    c << 2.0;
    CHECK(solve_sinkhorn(c, 5.0).plan.pi(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("small epsilon approaches the exact value") {
    Matrix c(2, 2);
    c << 0, 1, 1, 0;
    SinkhornSolution sol = solve_sinkhorn(c, 0.01);
    CHECK(sol.value == doctest::Approx(0.0).epsilon(1e-3).scale(1.0));
    CHECK(sol.plan.marginal_violation() < 1e-6);
  }
  SUBCASE("invalid epsilon") {
    CHECK_THROWS_AS(solve_sinkhorn(Matrix::Zero(2, 2), 0.0), Error);
  }
}
