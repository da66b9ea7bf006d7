#pragma once

#include <algorithm>
#include <functional>
#include <numeric>
#include <vector>

#include "fgw/fgw.hpp"
#include "fgw/graph.hpp"

namespace fgw::testutil {

inline LabeledGraph random_graph(int n, int d, Rng& rng, double edge_p = 0.5) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix C = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(rng) < edge_p) C(i, j) = C(j, i) = 1.0;
  Matrix F(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) F(i, k) = unif(rng);
  return LabeledGraph{C, F};
}

inline RelaxedGraph random_relaxed(int n, int d, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) C(i, j) = C(j, i) = unif(rng);
  Matrix F(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) F(i, k) = unif(rng);
  return RelaxedGraph{C, F};
}

inline Permutation random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return make_permutation(p);
}

// Exhaustive LP oracle: every vertex of the transportation polytope is the
// basic solution of some spanning tree of the complete bipartite graph.
// Enumerate all cell subsets of size n1+n2-1, keep the trees, solve the tree
// flows by leaf elimination and take the cheapest nonnegative solution.
inline double brute_force_ot_value(const Matrix& cost) {
  int n1 = static_cast<int>(cost.rows());
  int n2 = static_cast<int>(cost.cols());
  int cells = n1 * n2, basis_size = n1 + n2 - 1;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> chosen;

  auto evaluate = [&]() {
    // Leaf elimination on the bipartite tree candidate.
    std::vector<double> residual(n1 + n2);
    for (int i = 0; i < n1; ++i) residual[i] = 1.0 / n1;
    for (int j = 0; j < n2; ++j) residual[n1 + j] = -1.0 / n2;
    std::vector<int> degree(n1 + n2, 0);
    std::vector<bool> used(chosen.size(), false);
    for (int e : chosen) {
      ++degree[e / n2];
      ++degree[n1 + e % n2];
    }
    double value = 0.0;
    bool feasible = true;
    for (int round = 0; round < basis_size; ++round) {
      int pick = -1, leaf = -1;
      for (size_t k = 0; k < chosen.size() && pick < 0; ++k) {
        if (used[k]) continue;
        int i = chosen[k] / n2, j = chosen[k] % n2;
        if (degree[i] == 1) {
          pick = static_cast<int>(k);
          leaf = i;
        } else if (degree[n1 + j] == 1) {
          pick = static_cast<int>(k);
          leaf = n1 + j;
        }
      }
      if (pick < 0) return;  // cycle: not a tree
      int i = chosen[pick] / n2, j = chosen[pick] % n2;
      double f = (leaf < n1) ? residual[leaf] : -residual[leaf];
      if (f < -1e-12) feasible = false;
      value += f * cost(i, j);
      int other = (leaf < n1) ? n1 + j : i;
      residual[other] -= (other < n1) ? f : -f;
      residual[leaf] = 0.0;
      used[pick] = true;
      --degree[leaf];
      --degree[other];
    }
    if (feasible) best = std::min(best, value);
  };

  // Enumerate combinations of cells.
  std::vector<int> idx(basis_size);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == basis_size) {
      chosen.assign(idx.begin(), idx.end());
      evaluate();
      return;
    }
    for (int c = start; c <= cells - (basis_size - depth); ++c) {
      idx[depth] = c;
      rec(c + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

// Naive O(n^4) evaluation of T[i,j] = sum_{k,l} (C1(i,k)-C2(j,l))^2 pi(k,l).
inline Matrix naive_gw_tensor(const Matrix& C1, const Matrix& C2,
                              const Matrix& pi) {
  int n1 = static_cast<int>(C1.rows());
  int n2 = static_cast<int>(C2.rows());
  Matrix T = Matrix::Zero(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n1; ++k)
        for (int l = 0; l < n2; ++l) {
          double diff = C1(i, k) - C2(j, l);
          T(i, j) += diff * diff * pi(k, l);
        }
  return T;
}

}  // namespace fgw::testutil
