#pragma once

#include "fgw/types.hpp"

namespace fgw {

// Coupling with uniform marginals a = 1/n1, b = 1/n2 (implicit).
struct TransportPlan {
  Matrix pi;

  int n1() const { return static_cast<int>(pi.rows()); }
  int n2() const { return static_cast<int>(pi.cols()); }
  double marginal_violation() const;
};

struct OtSolution {
  TransportPlan plan;
  double value = 0.0;
};

struct SinkhornSolution {
  TransportPlan plan;
  double value = 0.0;
  bool converged = false;
};

// M[i,j] = squared Euclidean distance between rows of F1 and F2.
Matrix feature_cost_matrix(const Matrix& F1, const Matrix& F2);

// Exact transportation simplex; returns an optimal vertex of the polytope
// (at most n1+n2-1 nonzeros). Deterministic: entering arc = most negative
// reduced cost with lexicographic tie-break, degenerate supplies handled by
// epsilon perturbation removed on output.
OtSolution solve_exact(const Matrix& cost);

// Entropic regularization with rounding onto the polytope.
SinkhornSolution solve_sinkhorn(const Matrix& cost, double epsilon,
                                int max_iter = 10000);

// Product coupling a b^T, the canonical interior point.
TransportPlan product_plan(int n1, int n2);

// Random feasible plan (Sinkhorn on an iid uniform cost).
TransportPlan random_plan(int n1, int n2, Rng& rng);

}  // namespace fgw
