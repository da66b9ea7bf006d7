#include "fgw/fgw.hpp"

#include <cmath>

namespace fgw {

namespace {

void check_plan_shape(const FgwProblem& p, const Matrix& pi) {
  if (pi.rows() != p.n1() || pi.cols() != p.n2())
    fail(ErrorKind::ShapeMismatch, "plan shape does not match problem");
}

Matrix feature_cost(const FgwProblem& p) {
  if (p.beta == 1.0) return Matrix::Zero(p.n1(), p.n2());
  return feature_cost_matrix(p.F1, p.F2);
}

Matrix fgw_gradient(const FgwProblem& p, const Matrix& M, const Matrix& pi) {
  Matrix G = 2.0 * p.beta * gw_tensor_apply(p.C1, p.C2, pi);
  if (p.beta != 1.0) G += (1.0 - p.beta) * M;
  return G;
}

double objective_with(const FgwProblem& p, const Matrix& M, const Matrix& pi) {
  double val = p.beta * (gw_tensor_apply(p.C1, p.C2, pi).array() * pi.array()).sum();
  if (p.beta != 1.0) val += (1.0 - p.beta) * (M.array() * pi.array()).sum();
  return val;
}

// Step minimizing a*tau^2 + b*tau on [0,1].
double quad_step(double a, double b) {
  if (a > 0.0) return std::clamp(-b / (2.0 * a), 0.0, 1.0);
  // Concave or linear: compare endpoints.
  return (a + b < 0.0) ? 1.0 : 0.0;
}

FgwSolution solve_from(const FgwProblem& p, const Matrix& M, Matrix pi,
                       int max_iter, double tol) {
  FgwSolution sol;
  double obj = objective_with(p, M, pi);
  sol.objective_trace.push_back(obj);
  for (int it = 0; it < max_iter; ++it) {
    Matrix T = gw_tensor_apply(p.C1, p.C2, pi);
    Matrix G = 2.0 * p.beta * T;
    if (p.beta != 1.0) G += (1.0 - p.beta) * M;
    OtSolution lin = solve_exact(G);
    Matrix delta = lin.plan.pi - pi;
    double gap = -(G.array() * delta.array()).sum();  // FW gap, nonnegative
    sol.fw_gap = gap;
    if (gap <= tol * (1.0 + std::abs(obj))) {
      sol.converged = true;
      sol.iterations = it;
      break;
    }
    double a = -2.0 * p.beta *
               ((p.C1 * delta * p.C2.transpose()).array() * delta.array()).sum();
    double b = 2.0 * p.beta * (T.array() * delta.array()).sum();
    if (p.beta != 1.0) b += (1.0 - p.beta) * (M.array() * delta.array()).sum();
    double tau = quad_step(a, b);
    if (tau == 0.0) {
      sol.converged = true;
      sol.iterations = it;
      break;
    }
    pi += tau * delta;
    double new_obj = objective_with(p, M, pi);
    if (new_obj > obj) {  // float drift guard
      pi -= tau * delta;
      sol.converged = true;
      sol.iterations = it;
      break;
    }
    obj = new_obj;
    sol.objective_trace.push_back(obj);
    sol.iterations = it + 1;
    if (sol.objective_trace.size() >= 2) {
      double prev = sol.objective_trace[sol.objective_trace.size() - 2];
      if (prev - obj < tol * (1.0 + std::abs(prev))) {
        sol.converged = true;
        break;
      }
    }
  }
  sol.value = obj;
  sol.plan = TransportPlan{pi};
  return sol;
}

}  // namespace

FgwProblem make_problem(const RelaxedGraph& z1, const RelaxedGraph& z2,
                        double beta) {
  if (beta < 0.0 || beta > 1.0)
    fail(ErrorKind::OutOfRange, "beta must lie in [0,1]");
  if (beta != 1.0 && z1.d() != z2.d())
    fail(ErrorKind::DimMismatch, "feature dimensions differ");
  return FgwProblem{z1.C, z1.F, z2.C, z2.F, beta};
}

Matrix gw_tensor_apply(const Matrix& C1, const Matrix& C2, const Matrix& pi) {
  if (C1.rows() != pi.rows() || C2.rows() != pi.cols())
    fail(ErrorKind::ShapeMismatch, "tensor apply shape mismatch");
  int n1 = static_cast<int>(C1.rows());
  int n2 = static_cast<int>(C2.rows());
  Vector c1 = C1.array().square().matrix().rowwise().sum() / n1;
  Vector c2 = C2.array().square().matrix().rowwise().sum() / n2;
  Matrix T = c1.replicate(1, n2) + c2.transpose().replicate(n1, 1) -
             2.0 * C1 * pi * C2.transpose();
  return T;
}

double fgw_objective(const FgwProblem& p, const Matrix& pi) {
  check_plan_shape(p, pi);
  return objective_with(p, feature_cost(p), pi);
}

TransportPlan fw_direction(const FgwProblem& p, const Matrix& pi) {
  check_plan_shape(p, pi);
  return solve_exact(fgw_gradient(p, feature_cost(p), pi)).plan;
}

double line_search(const FgwProblem& p, const Matrix& pi, const Matrix& s) {
  check_plan_shape(p, pi);
  check_plan_shape(p, s);
  Matrix delta = s - pi;
  double a = -2.0 * p.beta *
             ((p.C1 * delta * p.C2.transpose()).array() * delta.array()).sum();
  double b = 2.0 * p.beta *
             (gw_tensor_apply(p.C1, p.C2, pi).array() * delta.array()).sum();
  if (p.beta != 1.0)
    b += (1.0 - p.beta) * (feature_cost(p).array() * delta.array()).sum();
  return quad_step(a, b);
}

FgwSolution solve_fgw(const FgwProblem& p, const FgwOptions& opts) {
  Matrix M = feature_cost(p);
  Matrix init = opts.init ? *opts.init
                          : product_plan(p.n1(), p.n2()).pi;
  if (init.rows() != p.n1() || init.cols() != p.n2())
    fail(ErrorKind::ShapeMismatch, "init plan shape mismatch");
  FgwSolution best = solve_from(p, M, init, opts.max_iter, opts.tol);
  if (opts.restarts > 1) {
    Rng rng(opts.seed);
    for (int r = 1; r < opts.restarts; ++r) {
      Matrix start = random_plan(p.n1(), p.n2(), rng).pi;
      FgwSolution cand = solve_from(p, M, start, opts.max_iter, opts.tol);
      if (cand.value < best.value) best = cand;
    }
  }
  return best;
}

FixedPlanGrad grad_fixed_plan(const FgwProblem& p, const Matrix& pi) {
  check_plan_shape(p, pi);
  int n1 = p.n1();
  FixedPlanGrad g;
  g.dC1 = 2.0 * p.beta *
          (p.C1 / (static_cast<double>(n1) * n1) - pi * p.C2 * pi.transpose());
  if (p.beta != 1.0)
    g.dF1 = 2.0 * (1.0 - p.beta) * (p.F1 / n1 - pi * p.F2);
  else
    g.dF1 = Matrix::Zero(p.F1.rows(), p.F1.cols());
  return g;
}

}  // namespace fgw
