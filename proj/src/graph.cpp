#include "fgw/graph.hpp"

#include <algorithm>
#include <cmath>

namespace fgw {

namespace {

void check_square(const Matrix& C) {
  if (C.rows() != C.cols() || C.rows() < 1)
    fail(ErrorKind::NonSquare, "adjacency matrix must be square and nonempty");
}

Matrix symmetrize_or_fail(const Matrix& C) {
  double asym = (C - C.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12)
    fail(ErrorKind::AsymmetricAdjacency,
         "adjacency asymmetry " + std::to_string(asym) + " exceeds 1e-12");
  return 0.5 * (C + C.transpose());
}

}  // namespace

Permutation Permutation::inverse() const {
  Permutation inv;
  inv.perm.resize(perm.size());
  for (int i = 0; i < size(); ++i) inv.perm[perm[i]] = i;
  return inv;
}

Permutation make_permutation(std::vector<int> perm) {
  int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v])
      fail(ErrorKind::OutOfRange, "not a bijection on {0..n-1}");
    seen[v] = true;
  }
  return Permutation{std::move(perm)};
}

LabeledGraph new_labeled_graph(const Matrix& C, const Matrix& F) {
  check_square(C);
  if (F.rows() != C.rows())
    fail(ErrorKind::RowCountMismatch, "feature rows must match node count");
  Matrix Cs = symmetrize_or_fail(C);
  for (int i = 0; i < Cs.rows(); ++i)
    for (int j = 0; j < Cs.cols(); ++j) {
      double v = Cs(i, j);
      if (v != 0.0 && v != 1.0)
        fail(ErrorKind::NonBinaryEntry,
             "adjacency entry " + std::to_string(v) + " is not in {0,1}");
    }
  return LabeledGraph{Cs, F};
}

RelaxedGraph new_relaxed_graph(const Matrix& C, const Matrix& F) {
  check_square(C);
  if (F.rows() != C.rows())
    fail(ErrorKind::RowCountMismatch, "feature rows must match node count");
  if (!F.allFinite())
    fail(ErrorKind::NonFiniteCost, "features must be finite");
  Matrix Cs = symmetrize_or_fail(C);
  Cs = Cs.cwiseMax(0.0).cwiseMin(1.0);
  return RelaxedGraph{Cs, F};
}

LabeledGraph permute(const LabeledGraph& g, const Permutation& p) {
  if (p.size() != g.n())
    fail(ErrorKind::SizeMismatch, "permutation size does not match graph");
  int n = g.n();
  Matrix C(n, n), F(n, g.d());
  for (int i = 0; i < n; ++i) {
    F.row(p.perm[i]) = g.F.row(i);
    for (int j = 0; j < n; ++j) C(p.perm[i], p.perm[j]) = g.C(i, j);
  }
  return LabeledGraph{C, F};
}

Matrix one_hot_features(const std::vector<int>& labels, int d) {
  Matrix F = Matrix::Zero(static_cast<int>(labels.size()), d);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[i] < 0 || labels[i] >= d)
      fail(ErrorKind::LabelOutOfRange,
           "label " + std::to_string(labels[i]) + " outside [0," +
               std::to_string(d) + ")");
    F(i, labels[i]) = 1.0;
  }
  return F;
}

Matrix normalized_laplacian(const Matrix& C) {
  check_square(C);
  int n = static_cast<int>(C.rows());
  Vector deg = C.rowwise().sum();
  Vector dinv(n);
  for (int i = 0; i < n; ++i)
    dinv(i) = deg(i) > 0.0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  Matrix L = Matrix::Identity(n, n) -
             dinv.asDiagonal() * C * dinv.asDiagonal();
  return 0.5 * (L + L.transpose());
}

Matrix diffuse_features(const Matrix& C, const Matrix& F, double tau) {
  if (tau < 0.0) fail(ErrorKind::NegativeTau, "tau must be nonnegative");
  Matrix L = normalized_laplacian(C);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(L);
  Vector scale = (-tau * eig.eigenvalues().array()).exp();
  return eig.eigenvectors() * scale.asDiagonal() *
         eig.eigenvectors().transpose() * F;
}

LabeledGraph bernoulli_sample(const RelaxedGraph& z, Rng& rng,
                              bool snap_features) {
  int n = z.n();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix C = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double e = unif(rng) < z.C(i, j) ? 1.0 : 0.0;
      C(i, j) = e;
      C(j, i) = e;
    }
  Matrix F = z.F;
  if (snap_features) {
    Matrix snapped = Matrix::Zero(F.rows(), F.cols());
    for (int i = 0; i < F.rows(); ++i) {
      int best = 0;
      for (int k = 1; k < F.cols(); ++k)
        if (F(i, k) > F(i, best)) best = k;  // ties keep lowest index
      snapped(i, best) = 1.0;
    }
    F = snapped;
  }
  return LabeledGraph{C, F};
}

RelaxedGraph relax(const LabeledGraph& g) { return RelaxedGraph{g.C, g.F}; }

}  // namespace fgw
