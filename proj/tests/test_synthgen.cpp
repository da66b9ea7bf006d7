#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "fgw/synthgen.hpp"
#include "test_util.hpp"

using namespace fgw;

namespace {

std::vector<int> labels_of(const LabeledGraph& g) {
  std::vector<int> out(g.n());
  for (int i = 0; i < g.n(); ++i)
    out[i] = static_cast<int>(std::lround(g.F(i, 0)));
  return out;
}

// Empirical edge density between two label groups.
double density(const LabeledGraph& g, const std::vector<int>& lab, int a,
               int b) {
  double edges = 0.0, pairs = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = i + 1; j < g.n(); ++j) {
      if (!((lab[i] == a && lab[j] == b) || (lab[i] == b && lab[j] == a)))
        continue;
      if (a == b && lab[i] != a) continue;
      pairs += 1.0;
      edges += g.C(i, j);
    }
  return pairs > 0 ? edges / pairs : 0.0;
}

}  // namespace

TEST_CASE("split_probability") {
  CHECK(split_probability(2.0) == doctest::Approx(0.01));
  CHECK(split_probability(3.5) == doctest::Approx(0.4545));
  CHECK(split_probability(2.999999) == doctest::Approx(0.899).epsilon(1e-4));
  CHECK(split_probability(1.0) == doctest::Approx(0.01));
  CHECK(split_probability(6.0) == doctest::Approx(0.01));
  CHECK_THROWS_AS(split_probability(0.5), Error);
  CHECK_THROWS_AS(split_probability(6.5), Error);
}

TEST_CASE("sample_sbm_graph basics") {
  SUBCASE("node count in range and valid discrete graph") {
    for (int seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      LabeledGraph g = sample_sbm_graph(2.5, rng);
      CHECK(g.n() >= 40);
      CHECK(g.n() <= 45);
      CHECK_NOTHROW(new_labeled_graph(g.C, g.F));
    }
  }
  SUBCASE("integer x yields exactly floor(x) labels") {
    for (double x : {1.0, 3.0, 6.0}) {
      Rng rng(7);
      std::vector<int> lab = labels_of(sample_sbm_graph(x, rng));
      std::set<int> seen(lab.begin(), lab.end());
      CHECK(static_cast<int>(seen.size()) == static_cast<int>(x));
      CHECK(*seen.rbegin() < static_cast<int>(x));
    }
  }
  SUBCASE("fractional x can use one extra label, never more") {
    int with_new = 0;
    for (int seed = 0; seed < 30; ++seed) {
      Rng rng(seed);
      std::vector<int> lab = labels_of(sample_sbm_graph(2.9, rng));
      std::set<int> seen(lab.begin(), lab.end());
      CHECK(*seen.rbegin() <= 2);
      if (seen.count(2)) ++with_new;
    }
    // At frac 0.9 the extra label should show up nearly always.
    CHECK(with_new >= 25);
  }
  SUBCASE("x out of range rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_sbm_graph(0.9, rng), Error);
    CHECK_THROWS_AS(sample_sbm_graph(6.1, rng), Error);
  }
  SUBCASE("one-hot features") {
    Rng rng(3);
    LabeledGraph g = sample_sbm_graph(4.2, rng, true);
    CHECK(g.d() == 7);
    for (int i = 0; i < g.n(); ++i) {
      CHECK(g.F.row(i).sum() == 1.0);
      CHECK(g.F.row(i).maxCoeff() == 1.0);
    }
  }
  SUBCASE("same seed reproduces the graph") {
    Rng a(11), b(11);
    LabeledGraph ga = sample_sbm_graph(3.7, a);
    LabeledGraph gb = sample_sbm_graph(3.7, b);
    CHECK((ga.C - gb.C).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ga.F - gb.F).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("sample_sbm_graph empirical densities at integer x") {
  // At integer x there is no split pair, so labels match blocks exactly.
  double intra = 0.0, inter = 0.0;
  int intra_count = 0, inter_count = 0;
  for (int seed = 0; seed < 40; ++seed) {
    Rng rng(seed + 100);
    LabeledGraph g = sample_sbm_graph(3.0, rng);
    std::vector<int> lab = labels_of(g);
    for (int a = 0; a < 3; ++a) {
      intra += density(g, lab, a, a);
      ++intra_count;
      for (int b = a + 1; b < 3; ++b) {
        inter += density(g, lab, a, b);
        ++inter_count;
      }
    }
  }
  CHECK(intra / intra_count == doctest::Approx(0.9).epsilon(0.02));
  CHECK(inter / inter_count == doctest::Approx(0.01).epsilon(0.5));
}

TEST_CASE("split density interpolates with the fractional part") {
  // Near the upper end of the fraction the split pair connects almost as
  // strongly as an intra block, so the two halves merge in practice.
  auto mean_cross = [](double x) {
    double total = 0.0;
    int count = 0;
    for (int seed = 0; seed < 30; ++seed) {
      Rng rng(seed + 500);
      LabeledGraph g = sample_sbm_graph(x, rng);
      // Identify the emerging members structurally: nodes of block 0 are
      // the first block_size entries; the carved half sits at its end.
      // Use labels only to separate "old" blocks; cross density is between
      // the first and second halves of the original block 0 span.
      int n = g.n();
      int base = static_cast<int>(std::floor(x));
      int b0 = n / base + (n % base > 0 ? 1 : 0);
      int carved = b0 / 2, start = b0 - carved;
      double edges = 0.0, pairs = 0.0;
      for (int i = 0; i < start; ++i)
        for (int j = start; j < b0; ++j) {
          edges += g.C(i, j);
          pairs += 1.0;
        }
      total += edges / pairs;
      ++count;
    }
    return total / count;
  };
  double low = mean_cross(2.1), high = mean_cross(2.9);
  CHECK(low == doctest::Approx(split_probability(2.1)).epsilon(0.15));
  CHECK(high == doctest::Approx(split_probability(2.9)).epsilon(0.1));
  CHECK(high > low);
}

TEST_CASE("make_sbm_dataset") {
  Dataset ds = make_sbm_dataset(12, 42);
  REQUIRE(ds.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(ds.inputs[i].size() == 1);
    CHECK(ds.inputs[i](0) >= 1.0);
    CHECK(ds.inputs[i](0) <= 6.0);
    CHECK(ds.graphs[i].n() >= 40);
    CHECK(ds.graphs[i].n() <= 45);
  }
  SUBCASE("deterministic per seed") {
    Dataset again = make_sbm_dataset(12, 42);
    for (int i = 0; i < 12; ++i) {
      CHECK(again.inputs[i](0) == ds.inputs[i](0));
      CHECK((again.graphs[i].C - ds.graphs[i].C).cwiseAbs().maxCoeff() == 0.0);
    }
    Dataset other = make_sbm_dataset(12, 43);
    bool differs = false;
    for (int i = 0; i < 12 && !differs; ++i)
      differs = other.inputs[i](0) != ds.inputs[i](0);
    CHECK(differs);
  }
  SUBCASE("invalid N rejected") {
    CHECK_THROWS_AS(make_sbm_dataset(0, 1), Error);
  }
}
