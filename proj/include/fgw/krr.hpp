#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "fgw/barycenter.hpp"
#include "fgw/io.hpp"

namespace fgw {

enum class KernelKind { Gaussian, Linear, Precomputed };

struct Kernel {
  KernelKind kind = KernelKind::Gaussian;
  double gamma = 1.0;          // gaussian only
  Matrix gram;                 // precomputed only, N x N

  static Kernel gaussian(double gamma);
  static Kernel linear();
  static Kernel precomputed(Matrix gram);

  double operator()(const Vector& x, const Vector& y) const;
};

Matrix gram_matrix(const Kernel& kernel, const std::vector<Vector>& X);

struct KrrModel {
  Kernel kernel;
  std::vector<Vector> inputs;
  std::vector<RelaxedGraph> graphs;  // training targets doubling as templates
  double lambda = 1.0;
  Eigen::LDLT<Matrix> factorization;  // of K + lambda I

  int size() const { return static_cast<int>(inputs.size()); }
};

KrrModel fit_krr(const Kernel& kernel, const std::vector<Vector>& X,
                 const std::vector<RelaxedGraph>& graphs, double lambda);

// alpha(x) = (K + lambda I)^{-1} k_x; raw weights, may be negative.
Vector weights_at(const KrrModel& model, const Vector& x);

// Keep the top_k largest signed values, zero the rest; ties keep lowest index.
Vector truncate_weights(const Vector& alpha, int top_k);

RelaxedGraph predict(const KrrModel& model, const Vector& x, int n, double beta,
                     int top_k, const BarycenterOptions& opts = {});

// Ascending barycenter-loss score over candidates using raw truncated weights.
std::vector<std::pair<int, double>> decode_candidates(
    const KrrModel& model, const Vector& x,
    const std::vector<RelaxedGraph>& candidates, double beta, int top_k,
    const FgwOptions& fgw_opts = {});

struct KrrGridResult {
  double lambda = 0.0;
  double gamma = 0.0;
  double validation_top1 = 0.0;
};

// Grid search on a 1/5 validation split (every 5th sample) scored by Top-1
// candidate decoding against the pooled dataset graphs.
KrrGridResult select_hyperparams(const std::vector<Vector>& X,
                                 const std::vector<RelaxedGraph>& graphs,
                                 const std::vector<double>& lambda_grid,
                                 const std::vector<double>& gamma_grid,
                                 double beta, int top_k,
                                 const FgwOptions& fgw_opts = {});

}  // namespace fgw
