#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fgw/graph.hpp"
#include "fgw/io.hpp"
#include "test_util.hpp"

using namespace fgw;

TEST_CASE("labeled graph construction and validation") {
  Matrix C(2, 2), F(2, 1);
  C << 0, 1, 1, 0;
  F << 1, 0;
  LabeledGraph g = new_labeled_graph(C, F);
  CHECK(g.n() == 2);
  CHECK(g.d() == 1);

  SUBCASE("asymmetric adjacency rejected") {
    Matrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(new_labeled_graph(bad, F), Error);
  }
  SUBCASE("relaxed entry rejected in discrete constructor") {
    Matrix bad(1, 1);
    bad << 0.5;
    Matrix f1(1, 1);
    f1 << 0;
    CHECK_THROWS_AS(new_labeled_graph(bad, f1), Error);
  }
  SUBCASE("non-square rejected") {
    Matrix bad(2, 3);
    bad.setZero();
    CHECK_THROWS_AS(new_labeled_graph(bad, F), Error);
  }
  SUBCASE("row count mismatch rejected") {
    Matrix f3(3, 1);
    f3.setZero();
    CHECK_THROWS_AS(new_labeled_graph(C, f3), Error);
  }
}

TEST_CASE("permute") {
  Matrix C(2, 2), F(2, 1);
  C << 0, 1, 1, 0;
  F << 1, 0;
  LabeledGraph g = new_labeled_graph(C, F);

  SUBCASE("identity") {
    LabeledGraph h = permute(g, make_permutation({0, 1}));
    CHECK(h.C == g.C);
    CHECK(h.F == g.F);
  }
  SUBCASE("swap on 2-path keeps C, swaps F") {
    LabeledGraph h = permute(g, make_permutation({1, 0}));
    CHECK(h.C == g.C);
    CHECK(h.F(0, 0) == 0.0);
    CHECK(h.F(1, 0) == 1.0);
  }
  SUBCASE("3-cycle round-trips with its inverse") {
    Rng rng(7);
    LabeledGraph g3 = testutil::random_graph(3, 2, rng);
    Permutation p = make_permutation({1, 2, 0});
    LabeledGraph back = permute(permute(g3, p), p.inverse());
    CHECK((back.C - g3.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.F - g3.F).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(permute(g, make_permutation({0, 2, 1})), Error);
  }
}

TEST_CASE("one_hot_features") {
  Matrix F = one_hot_features({0, 2}, 3);
  Matrix expect(2, 3);
  expect << 1, 0, 0, 0, 0, 1;
  CHECK(F == expect);
  CHECK(one_hot_features({0}, 1)(0, 0) == 1.0);
  Matrix rep = one_hot_features({1, 1}, 2);
  CHECK(rep.row(0) == rep.row(1));
  CHECK_THROWS_AS(one_hot_features({3}, 3), Error);
}

TEST_CASE("normalized_laplacian") {
  SUBCASE("isolated nodes give identity") {
    Matrix L = normalized_laplacian(Matrix::Zero(2, 2));
    CHECK((L - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("2-path") {
    Matrix C(2, 2);
    C << 0, 1, 1, 0;
    Matrix L = normalized_laplacian(C);
    Matrix expect(2, 2);
    expect << 1, -1, -1, 1;
    CHECK((L - expect).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("triangle") {
    Matrix C = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
    Matrix L = normalized_laplacian(C);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(L(i, j) == doctest::Approx(i == j ? 1.0 : -0.5).epsilon(1e-12));
  }
  SUBCASE("positive semidefinite on random graphs") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      LabeledGraph g = testutil::random_graph(8, 1, rng);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(normalized_laplacian(g.C));
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("diffuse_features") {
  Rng rng(3);
  LabeledGraph g = testutil::random_graph(6, 2, rng);

  SUBCASE("tau=0 is identity") {
    Matrix out = diffuse_features(g.C, g.F, 0.0);
    CHECK((out - g.F).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("empty graph scales by exp(-tau)") {
    Matrix F(2, 1);
    F << 1, 3;
    Matrix out = diffuse_features(Matrix::Zero(2, 2), F, 0.7);
    CHECK(out(0, 0) == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
    CHECK(out(1, 0) == doctest::Approx(3 * std::exp(-0.7)).epsilon(1e-12));
  }
  SUBCASE("2-path at large tau converges along the kernel of L") {
    Matrix C(2, 2), F(2, 1);
    C << 0, 1, 1, 0;
    F << 0, 2;
    Matrix out = diffuse_features(C, F, 50.0);
    // Kernel direction is (1,1)/sqrt(2): both rows approach the average.
    CHECK(out(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out(1, 0) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("negative tau rejected") {
    CHECK_THROWS_AS(diffuse_features(g.C, g.F, -1.0), Error);
  }
}

TEST_CASE("bernoulli_sample") {
  SUBCASE("deterministic extremes") {
    Rng rng(1);
    int n = 5;
    RelaxedGraph ones{Matrix::Ones(n, n), Matrix::Zero(n, 1)};
    LabeledGraph complete = bernoulli_sample(ones, rng);
    CHECK(complete.C.sum() == n * (n - 1));
    RelaxedGraph zeros{Matrix::Zero(n, n), Matrix::Zero(n, 1)};
    CHECK(bernoulli_sample(zeros, rng).C.sum() == 0.0);
  }
  SUBCASE("empirical edge frequency at p=0.5") {
    int n = 40;
    RelaxedGraph half{Matrix::Constant(n, n, 0.5), Matrix::Zero(n, 1)};
    double edges = 0.0;
    int trials = 200;  // 200 * 780 draws is plenty for +-0.02
    for (int seed = 0; seed < trials; ++seed) {
      Rng rng(seed);
      edges += bernoulli_sample(half, rng).C.sum() / 2.0;
    }
    double freq = edges / (trials * n * (n - 1) / 2.0);
    CHECK(freq == doctest::Approx(0.5).epsilon(0.04));
  }
  SUBCASE("output satisfies discrete invariants") {
    Rng rng(9);
    RelaxedGraph z = testutil::random_relaxed(12, 2, rng);
    LabeledGraph g = bernoulli_sample(z, rng);
    CHECK_NOTHROW(new_labeled_graph(g.C, g.F));
    CHECK(g.C.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("snap to one-hot, ties to lowest index") {
    Matrix F(2, 3);
    F << 0.2, 0.9, 0.9, 0.4, 0.4, 0.1;
    RelaxedGraph z{Matrix::Zero(2, 2), F};
    Rng rng(0);
    LabeledGraph g = bernoulli_sample(z, rng, true);
    CHECK(g.F(0, 1) == 1.0);
    CHECK(g.F(1, 0) == 1.0);
    CHECK(g.F.row(0).sum() == 1.0);
  }
}

TEST_CASE("serialization round-trip") {
  Rng rng(21);
  RelaxedGraph z = testutil::random_relaxed(7, 3, rng);
  z.C(0, 1) = z.C(1, 0) = 0.25;
  std::string text = serialize_graph(z);
  RelaxedGraph back = deserialize_graph(text);
  CHECK(back.C == z.C);
  CHECK(back.F == z.F);
  CHECK(serialize_graph(back) == text);

  CHECK_THROWS_AS(deserialize_graph("not a graph"), Error);
  CHECK_THROWS_AS(deserialize_graph("{\"version\":99}"), Error);
}
