#include "fgw/barycenter.hpp"

#include <cmath>

namespace fgw {

namespace {

void check_weights(const Vector& weights, int m) {
  if (static_cast<int>(weights.size()) != m)
    fail(ErrorKind::WeightError, "weight count does not match template count");
}

// Deterministic blow-up of a template to size n: barycenter node i inherits
// from template node floor(i * n_j / n).
RelaxedGraph blow_up(const RelaxedGraph& t, int n) {
  int nj = t.n();
  Matrix C(n, n), F(n, t.d());
  for (int i = 0; i < n; ++i) {
    int mi = static_cast<int>((static_cast<long>(i) * nj) / n);
    F.row(i) = t.F.row(mi);
    for (int k = 0; k < n; ++k) {
      int mk = static_cast<int>((static_cast<long>(k) * nj) / n);
      C(i, k) = t.C(mi, mk);
    }
  }
  return RelaxedGraph{C, F};
}

}  // namespace

Vector normalize_weights(const Vector& weights) {
  Vector w = weights.cwiseMax(0.0);
  double s = w.sum();
  if (s <= 0.0)
    fail(ErrorKind::WeightError, "all weights nonpositive after clamping");
  return w / s;
}

Matrix update_structure(const std::vector<TransportPlan>& plans,
                        const TemplateSet& templates, const Vector& weights,
                        int n) {
  check_weights(weights, templates.size());
  if (weights.minCoeff() < 0.0 || weights.sum() <= 0.0)
    fail(ErrorKind::WeightError, "weights must be nonnegative, positive sum");
  Matrix C = Matrix::Zero(n, n);
  for (int j = 0; j < templates.size(); ++j) {
    const Matrix& pi = plans[j].pi;
    if (pi.cols() != n || pi.rows() != templates.templates[j].n())
      fail(ErrorKind::ShapeMismatch, "plan shape mismatch in structure update");
    C += weights(j) * (pi.transpose() * templates.templates[j].C * pi);
  }
  C *= static_cast<double>(n) * n;
  C = 0.5 * (C + C.transpose());
  return C.cwiseMax(0.0).cwiseMin(1.0);
}

Matrix update_features(const std::vector<TransportPlan>& plans,
                       const TemplateSet& templates, const Vector& weights,
                       int n) {
  check_weights(weights, templates.size());
  if (weights.minCoeff() < 0.0 || weights.sum() <= 0.0)
    fail(ErrorKind::WeightError, "weights must be nonnegative, positive sum");
  Matrix F = Matrix::Zero(n, templates.d());
  for (int j = 0; j < templates.size(); ++j) {
    const Matrix& pi = plans[j].pi;
    if (pi.cols() != n || pi.rows() != templates.templates[j].n())
      fail(ErrorKind::ShapeMismatch, "plan shape mismatch in feature update");
    F += weights(j) * (pi.transpose() * templates.templates[j].F);
  }
  return static_cast<double>(n) * F;
}

BarycenterResult solve_barycenter(const TemplateSet& templates,
                                  const Vector& weights, int n, double beta,
                                  const BarycenterOptions& opts) {
  if (templates.size() < 1)
    fail(ErrorKind::WeightError, "template set is empty");
  if (n < 1) fail(ErrorKind::OutOfRange, "barycenter size must be >= 1");
  Vector w = normalize_weights(weights);
  int m = templates.size();

  RelaxedGraph bary;
  if (opts.init == BarycenterInit::LargestWeightTemplate) {
    int jbest = 0;
    w.maxCoeff(&jbest);
    bary = blow_up(templates.templates[jbest], n);
  } else {
    Rng rng(opts.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix C(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k) C(i, k) = C(k, i) = unif(rng);
    Vector mean_row = Vector::Zero(templates.d());
    for (int j = 0; j < m; ++j)
      mean_row += w(j) * templates.templates[j].F.colwise().mean().transpose();
    Matrix F = mean_row.transpose().replicate(n, 1);
    bary = RelaxedGraph{C, F};
  }

  BarycenterResult res;
  res.plans.resize(m);
  double prev_obj = std::numeric_limits<double>::infinity();
  Matrix prev_C, prev_F;
  std::vector<TransportPlan> prev_plans;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    double obj = 0.0;
    std::vector<TransportPlan> plans(m);
    for (int j = 0; j < m; ++j) {
      FgwProblem prob = make_problem(templates.templates[j], bary, beta);
      FgwOptions inner = opts.fgw;
      if (!prev_plans.empty()) inner.init = prev_plans[j].pi;  // warm start
      FgwSolution sol = solve_fgw(prob, inner);
      plans[j] = sol.plan;
      obj += w(j) * sol.value;
    }
    if (obj > prev_obj + 1e-12) {
      // Plan refresh is a local solve; keep the previous iterate.
      bary = RelaxedGraph{prev_C, prev_F};
      res.plans = prev_plans;
      break;
    }
    res.plans = plans;
    res.objective_trace.push_back(obj);
    res.iterations = outer + 1;
    bool done = std::isfinite(prev_obj) &&
                prev_obj - obj < opts.tol * (1.0 + std::abs(prev_obj));
    prev_obj = obj;
    prev_C = bary.C;
    prev_F = bary.F;
    prev_plans = plans;
    if (done) break;

    Matrix C = update_structure(plans, templates, w, n);
    Matrix F = beta == 1.0 ? bary.F : update_features(plans, templates, w, n);
    bary = RelaxedGraph{C, F};
  }

  // Report the objective of the returned iterate.
  res.graph = RelaxedGraph{prev_C, prev_F};
  res.objective = prev_obj;
  return res;
}

}  // namespace fgw
