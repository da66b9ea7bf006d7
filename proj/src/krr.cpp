#include "fgw/krr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fgw {

Kernel Kernel::gaussian(double gamma) {
  if (gamma <= 0.0) fail(ErrorKind::OutOfRange, "gaussian gamma must be > 0");
  Kernel k;
  k.kind = KernelKind::Gaussian;
  k.gamma = gamma;
  return k;
}

Kernel Kernel::linear() {
  Kernel k;
  k.kind = KernelKind::Linear;
  return k;
}

Kernel Kernel::precomputed(Matrix gram) {
  if (gram.rows() != gram.cols())
    fail(ErrorKind::NonSquare, "precomputed Gram must be square");
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorKind::NotPositiveDefinite, "precomputed Gram must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.eigenvalues().minCoeff() < -1e-8)
    fail(ErrorKind::NotPositiveDefinite,
         "precomputed Gram has eigenvalue below -1e-8");
  Kernel k;
  k.kind = KernelKind::Precomputed;
  k.gram = std::move(gram);
  return k;
}

double Kernel::operator()(const Vector& x, const Vector& y) const {
  if (x.size() != y.size())
    fail(ErrorKind::DimMismatch, "kernel input dimensions differ");
  switch (kind) {
    case KernelKind::Gaussian:
      return std::exp(-gamma * (x - y).squaredNorm());
    case KernelKind::Linear:
      return x.dot(y);
    case KernelKind::Precomputed:
      fail(ErrorKind::OutOfRange,
           "precomputed kernel cannot evaluate raw inputs");
  }
  return 0.0;
}

Matrix gram_matrix(const Kernel& kernel, const std::vector<Vector>& X) {
  int n = static_cast<int>(X.size());
  if (kernel.kind == KernelKind::Precomputed) {
    if (kernel.gram.rows() != n)
      fail(ErrorKind::DimMismatch, "precomputed Gram size mismatch");
    return kernel.gram;
  }
  Matrix K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) K(i, j) = K(j, i) = kernel(X[i], X[j]);
  return K;
}

KrrModel fit_krr(const Kernel& kernel, const std::vector<Vector>& X,
                 const std::vector<RelaxedGraph>& graphs, double lambda) {
  if (lambda <= 0.0) fail(ErrorKind::OutOfRange, "lambda must be > 0");
  if (X.empty() || X.size() != graphs.size())
    fail(ErrorKind::DimMismatch, "inputs and graphs must pair up");
  int n = static_cast<int>(X.size());
  Matrix K = gram_matrix(kernel, X);
  Matrix A = K + lambda * Matrix::Identity(n, n);
  Eigen::LDLT<Matrix> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    fail(ErrorKind::NotPositiveDefinite, "K + lambda I is not factorizable");
  KrrModel model;
  model.kernel = kernel;
  model.inputs = X;
  model.graphs = graphs;
  model.lambda = lambda;
  model.factorization = std::move(ldlt);
  return model;
}

Vector weights_at(const KrrModel& model, const Vector& x) {
  int n = model.size();
  Vector kx(n);
  for (int i = 0; i < n; ++i) kx(i) = model.kernel(x, model.inputs[i]);
  return model.factorization.solve(kx);
}

Vector truncate_weights(const Vector& alpha, int top_k) {
  int n = static_cast<int>(alpha.size());
  if (top_k < 1) fail(ErrorKind::OutOfRange, "top_k must be >= 1");
  if (top_k >= n) return alpha;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return alpha(a) > alpha(b); });
  Vector out = Vector::Zero(n);
  for (int k = 0; k < top_k; ++k) out(idx[k]) = alpha(idx[k]);
  return out;
}

RelaxedGraph predict(const KrrModel& model, const Vector& x, int n, double beta,
                     int top_k, const BarycenterOptions& opts) {
  Vector alpha = truncate_weights(weights_at(model, x), top_k);
  TemplateSet templates{model.graphs};
  return solve_barycenter(templates, alpha, n, beta, opts).graph;
}

std::vector<std::pair<int, double>> decode_candidates(
    const KrrModel& model, const Vector& x,
    const std::vector<RelaxedGraph>& candidates, double beta, int top_k,
    const FgwOptions& fgw_opts) {
  if (candidates.empty())
    fail(ErrorKind::EmptyCandidateSet, "no candidates to decode");
  Vector alpha = truncate_weights(weights_at(model, x), top_k);
  std::vector<std::pair<int, double>> scored;
  scored.reserve(candidates.size());
  for (int c = 0; c < static_cast<int>(candidates.size()); ++c) {
    double score = 0.0;
    for (int j = 0; j < model.size(); ++j) {
      if (alpha(j) == 0.0) continue;
      FgwProblem prob = make_problem(candidates[c], model.graphs[j], beta);
      score += alpha(j) * solve_fgw(prob, fgw_opts).value;
    }
    scored.emplace_back(c, score);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) {
                     return a.second < b.second;
                   });
  return scored;
}

KrrGridResult select_hyperparams(const std::vector<Vector>& X,
                                 const std::vector<RelaxedGraph>& graphs,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& gamma_grid,
                                 double beta, int top_k,
                                 const FgwOptions& fgw_opts) {
  int n = static_cast<int>(X.size());
  if (n < 2)
    fail(ErrorKind::InsufficientTrainingData,
         "need at least 2 samples for a validation split");
  if (lambda_grid.empty() || gamma_grid.empty())
    fail(ErrorKind::OutOfRange, "empty hyperparameter grid");

  std::vector<int> train_idx, val_idx;
  for (int i = 0; i < n; ++i)
    (i % 5 == 4 ? val_idx : train_idx).push_back(i);
  if (val_idx.empty()) val_idx.push_back(train_idx.back());

  std::vector<Vector> Xtr;
  std::vector<RelaxedGraph> Gtr;
  for (int i : train_idx) {
    Xtr.push_back(X[i]);
    Gtr.push_back(graphs[i]);
  }

  // Candidate pool for validation Top-1: every dataset graph.
  // Precompute pairwise FGW(candidate c, train template j) once.
  int ntr = static_cast<int>(Xtr.size());
  Matrix D(n, ntr);
  for (int c = 0; c < n; ++c)
    for (int j = 0; j < ntr; ++j) {
      FgwProblem prob = make_problem(graphs[c], Gtr[j], beta);
      D(c, j) = solve_fgw(prob, fgw_opts).value;
    }

  KrrGridResult best;
  best.validation_top1 = -1.0;
  for (double gamma : gamma_grid) {
    Kernel kernel = Kernel::gaussian(gamma);
    for (double lambda : lambda_grid) {
      KrrModel model = fit_krr(kernel, Xtr, Gtr, lambda);
      int hits = 0;
      for (int vi : val_idx) {
        Vector alpha =
            truncate_weights(weights_at(model, X[vi]),
                             std::min(top_k, ntr));
        double best_score = std::numeric_limits<double>::infinity();
        double truth_score = 0.0;
        for (int c = 0; c < n; ++c) {
          double score = 0.0;
          for (int j = 0; j < ntr; ++j)
            if (alpha(j) != 0.0) score += alpha(j) * D(c, j);
          best_score = std::min(best_score, score);
          if (c == vi) truth_score = score;
        }
        // Duplicated graphs tie exactly; the truth counts if it ties the top.
        if (truth_score <= best_score + 1e-12) ++hits;
      }
      double top1 = static_cast<double>(hits) / val_idx.size();
      if (top1 > best.validation_top1) {
        best = {lambda, gamma, top1};
      }
    }
  }
  return best;
}

}  // namespace fgw
