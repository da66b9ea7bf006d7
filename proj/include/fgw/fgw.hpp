#pragma once

#include <optional>
#include <vector>

#include "fgw/graph.hpp"
#include "fgw/ot.hpp"

namespace fgw {

struct FgwProblem {
  Matrix C1, F1;
  Matrix C2, F2;
  double beta = 0.5;

  int n1() const { return static_cast<int>(C1.rows()); }
  int n2() const { return static_cast<int>(C2.rows()); }
};

FgwProblem make_problem(const RelaxedGraph& z1, const RelaxedGraph& z2,
                        double beta);

struct FgwSolution {
  double value = 0.0;
  TransportPlan plan;
  int iterations = 0;
  bool converged = false;
  double fw_gap = 0.0;
  std::vector<double> objective_trace;
};

struct FgwOptions {
  int max_iter = 500;
  double tol = 1e-9;
  int restarts = 1;
  std::optional<Matrix> init;  // feasible plan; default product coupling
  std::uint64_t seed = 0;      // for random restarts
};

// T[i,j] = sum_{k,l} (C1(i,k) - C2(j,l))^2 pi_{k,l}, via the squared-loss
// factorization c - 2 C1 pi C2^T with uniform marginals.
Matrix gw_tensor_apply(const Matrix& C1, const Matrix& C2, const Matrix& pi);

double fgw_objective(const FgwProblem& p, const Matrix& pi);

// Linear minimization oracle on the gradient (1-beta) M_F + 2 beta T(pi).
TransportPlan fw_direction(const FgwProblem& p, const Matrix& pi);

// Exact step for the quadratic restriction of the objective to the segment
// pi + tau (s - pi), tau in [0,1].
double line_search(const FgwProblem& p, const Matrix& pi, const Matrix& s);

FgwSolution solve_fgw(const FgwProblem& p, const FgwOptions& opts = {});

struct FixedPlanGrad {
  Matrix dC1;
  Matrix dF1;
};

// Gradient of fgw_objective w.r.t. (C1, F1) with pi held constant.
FixedPlanGrad grad_fixed_plan(const FgwProblem& p, const Matrix& pi);

}  // namespace fgw
