#pragma once

#include <vector>

#include "fgw/types.hpp"

namespace fgw {

// Discrete labeled graph (C, F) with implicit uniform node weights 1/n.
// C is a binary symmetric adjacency matrix, F holds one feature row per node.
struct LabeledGraph {
  Matrix C;
  Matrix F;

  int n() const { return static_cast<int>(C.rows()); }
  int d() const { return static_cast<int>(F.cols()); }
};

// Continuous relaxation: C symmetric with entries in [0,1], F real-valued.
struct RelaxedGraph {
  Matrix C;
  Matrix F;

  int n() const { return static_cast<int>(C.rows()); }
  int d() const { return static_cast<int>(F.cols()); }
};

struct Permutation {
  std::vector<int> perm;

  int size() const { return static_cast<int>(perm.size()); }
  Permutation inverse() const;
};

LabeledGraph new_labeled_graph(const Matrix& C, const Matrix& F);
RelaxedGraph new_relaxed_graph(const Matrix& C, const Matrix& F);
Permutation make_permutation(std::vector<int> perm);

LabeledGraph permute(const LabeledGraph& g, const Permutation& p);

Matrix one_hot_features(const std::vector<int>& labels, int d);

// L = I - D^{-1/2} C D^{-1/2}; zero-degree nodes get L[i,i] = 1.
Matrix normalized_laplacian(const Matrix& C);

// F_diff = exp(-tau * Lap(C)) F, via symmetric eigendecomposition.
Matrix diffuse_features(const Matrix& C, const Matrix& F, double tau);

// Draw each edge i<j once with probability C[i,j], mirror, zero diagonal.
// With snap_features, each feature row becomes the argmax basis vector.
LabeledGraph bernoulli_sample(const RelaxedGraph& z, Rng& rng,
                              bool snap_features = false);

RelaxedGraph relax(const LabeledGraph& g);

}  // namespace fgw
