#include "fgw/ot.hpp"

#include <cmath>
#include <queue>
#include <vector>

namespace fgw {

double TransportPlan::marginal_violation() const {
  double a = 1.0 / n1(), b = 1.0 / n2();
  double va = (pi.rowwise().sum().array() - a).abs().maxCoeff();
  double vb = (pi.colwise().sum().array() - b).abs().maxCoeff();
  return std::max(va, vb);
}

Matrix feature_cost_matrix(const Matrix& F1, const Matrix& F2) {
  if (F1.cols() != F2.cols())
    fail(ErrorKind::DimMismatch, "feature dimensions differ");
  Vector s1 = F1.rowwise().squaredNorm();
  Vector s2 = F2.rowwise().squaredNorm();
  Matrix M = s1.replicate(1, F2.rows()) +
             s2.transpose().replicate(F1.rows(), 1) -
             2.0 * F1 * F2.transpose();
  return M.cwiseMax(0.0);
}

namespace {

struct BasisCell {
  int i, j;
  double flow;
};

// Flows on a spanning tree are determined by the marginals: peel leaves.
void retriangulate_flows(std::vector<BasisCell>& basis, int n1, int n2,
                         const std::vector<double>& supply,
                         const std::vector<double>& demand) {
  int nn = n1 + n2;
  std::vector<double> residual(nn);
  for (int i = 0; i < n1; ++i) residual[i] = supply[i];
  for (int j = 0; j < n2; ++j) residual[n1 + j] = -demand[j];
  std::vector<int> degree(nn, 0);
  std::vector<std::vector<int>> incident(nn);
  for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
    incident[basis[e].i].push_back(e);
    incident[n1 + basis[e].j].push_back(e);
    ++degree[basis[e].i];
    ++degree[n1 + basis[e].j];
  }
  std::vector<bool> done(basis.size(), false);
  std::queue<int> leaves;
  for (int v = 0; v < nn; ++v)
    if (degree[v] == 1) leaves.push(v);
  while (!leaves.empty()) {
    int v = leaves.front();
    leaves.pop();
    if (degree[v] != 1) continue;
    int edge = -1;
    for (int e : incident[v])
      if (!done[e]) edge = e;
    if (edge < 0) continue;
    auto& c = basis[edge];
    // Flow i -> j carries +residual from the row side.
    double f = (v < n1) ? residual[v] : -residual[v];
    c.flow = f;
    int other = (v < n1) ? n1 + c.j : c.i;
    residual[v] = 0.0;
    residual[other] -= (other < n1) ? f : -f;
    done[edge] = true;
    --degree[v];
    if (--degree[other] == 1) leaves.push(other);
  }
}

}  // namespace

OtSolution solve_exact(const Matrix& cost) {
  if (!cost.allFinite())
    fail(ErrorKind::NonFiniteCost, "cost matrix must be finite");
  int n1 = static_cast<int>(cost.rows());
  int n2 = static_cast<int>(cost.cols());
  double a = 1.0 / n1, b = 1.0 / n2;

  // Perturbed supplies: classic anti-degeneracy scheme, removed on output.
  double delta = 1e-9 / n1;
  std::vector<double> supply(n1, a + delta);
  std::vector<double> demand(n2, b);
  demand[n2 - 1] += n1 * delta;

  // Northwest-corner initial basis.
  std::vector<BasisCell> basis;
  basis.reserve(n1 + n2 - 1);
  {
    std::vector<double> srem = supply, drem = demand;
    int i = 0, j = 0;
    while (i < n1 && j < n2) {
      double f = std::min(srem[i], drem[j]);
      basis.push_back({i, j, f});
      srem[i] -= f;
      drem[j] -= f;
      if (srem[i] <= drem[j] && i < n1 - 1) {
        ++i;
      } else if (j < n2 - 1) {
        ++j;
      } else {
        ++i;
      }
    }
  }

  int nn = n1 + n2;
  double tol = 1e-11 * (1.0 + cost.cwiseAbs().maxCoeff());
  std::vector<double> u(n1), v(n2);
  std::vector<std::vector<int>> incident(nn);
  std::vector<int> parent_edge(nn), order(nn);
  long max_pivots = 2000L * nn;

  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots)
      fail(ErrorKind::NumericError, "transportation simplex did not terminate");

    // Potentials via tree traversal from row 0.
    for (auto& lst : incident) lst.clear();
    for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
      incident[basis[e].i].push_back(e);
      incident[n1 + basis[e].j].push_back(e);
    }
    std::vector<bool> visited(nn, false);
    int head = 0, tail = 0;
    order[tail++] = 0;
    visited[0] = true;
    u[0] = 0.0;
    parent_edge[0] = -1;
    while (head < tail) {
      int node = order[head++];
      for (int e : incident[node]) {
        int other = (node < n1) ? n1 + basis[e].j : basis[e].i;
        if (visited[other]) continue;
        visited[other] = true;
        parent_edge[other] = e;
        if (other < n1)
          u[other] = cost(basis[e].i, basis[e].j) - v[basis[e].j];
        else
          v[other - n1] = cost(basis[e].i, basis[e].j) - u[basis[e].i];
        order[tail++] = other;
      }
    }

    // Entering arc: most negative reduced cost, lexicographic tie-break.
    int ei = -1, ej = -1;
    double best = -tol;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        double r = cost(i, j) - u[i] - v[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
        }
      }
    if (ei < 0) break;  // optimal

    // Cycle: tree path from col ej back to row ei via parent pointers is not
    // directly available; do a BFS from ei to n1+ej.
    std::vector<int> prev_edge(nn, -2), prev_node(nn, -1);
    std::queue<int> q;
    q.push(ei);
    prev_edge[ei] = -1;
    while (!q.empty()) {
      int node = q.front();
      q.pop();
      if (node == n1 + ej) break;
      for (int e : incident[node]) {
        int other = (node < n1) ? n1 + basis[e].j : basis[e].i;
        if (prev_edge[other] != -2) continue;
        prev_edge[other] = e;
        prev_node[other] = node;
        q.push(other);
      }
    }
    // Walk back from col ej collecting path edges; signs alternate, the edge
    // incident to ej is a minus cell.
    double theta = std::numeric_limits<double>::infinity();
    int leaving = -1;
    {
      int node = n1 + ej;
      int sign = -1;
      while (prev_edge[node] >= 0) {
        int e = prev_edge[node];
        if (sign < 0) {
          const auto& c = basis[e];
          if (c.flow < theta - 1e-18 ||
              (std::abs(c.flow - theta) <= 1e-18 &&
               (leaving < 0 || c.i < basis[leaving].i ||
                (c.i == basis[leaving].i && c.j < basis[leaving].j)))) {
            theta = c.flow;
            leaving = e;
          }
        }
        node = prev_node[node];
        sign = -sign;
      }
    }
    if (leaving < 0)
      fail(ErrorKind::NumericError, "no leaving arc found");
    {
      int node = n1 + ej;
      int sign = -1;
      while (prev_edge[node] >= 0) {
        int e = prev_edge[node];
        basis[e].flow += sign * theta;
        node = prev_node[node];
        sign = -sign;
      }
    }
    basis[leaving] = {ei, ej, theta};
  }

  // Drop the perturbation: recompute flows on the optimal basis tree with
  // the true uniform marginals.
  std::vector<double> supply0(n1, a), demand0(n2, b);
  retriangulate_flows(basis, n1, n2, supply0, demand0);

  Matrix pi = Matrix::Zero(n1, n2);
  for (const auto& c : basis) {
    double f = c.flow;
    if (f < -1e-15)
      fail(ErrorKind::NumericError, "negative basic flow after de-perturbation");
    pi(c.i, c.j) = std::max(f, 0.0);
  }
  double value = (cost.array() * pi.array()).sum();
  return OtSolution{TransportPlan{pi}, value};
}

SinkhornSolution solve_sinkhorn(const Matrix& cost, double epsilon,
                                int max_iter) {
  if (epsilon <= 0.0) fail(ErrorKind::OutOfRange, "epsilon must be positive");
  if (!cost.allFinite())
    fail(ErrorKind::NonFiniteCost, "cost matrix must be finite");
  int n1 = static_cast<int>(cost.rows());
  int n2 = static_cast<int>(cost.cols());
  double a = 1.0 / n1, b = 1.0 / n2;

  // Log-domain iterations for stability at small epsilon.
  Vector f = Vector::Zero(n1), g = Vector::Zero(n2);
  // softmin_eps over the free index; returned in cost units.
  auto row_min_soft = [&](const Vector& gg) {
    Vector out(n1);
    for (int i = 0; i < n1; ++i) {
      Vector t = (cost.row(i).transpose() - gg) / epsilon;
      double m = t.minCoeff();
      out(i) = epsilon * m -
               epsilon * std::log((-(t.array() - m)).exp().sum());
    }
    return out;
  };
  auto col_min_soft = [&](const Vector& ff) {
    Vector out(n2);
    for (int j = 0; j < n2; ++j) {
      Vector t = (cost.col(j) - ff) / epsilon;
      double m = t.minCoeff();
      out(j) = epsilon * m -
               epsilon * std::log((-(t.array() - m)).exp().sum());
    }
    return out;
  };
  bool converged = false;
  Matrix pi(n1, n2);
  for (int it = 0; it < max_iter; ++it) {
    f = row_min_soft(g) + Vector::Constant(n1, epsilon * std::log(a));
    g = col_min_soft(f) + Vector::Constant(n2, epsilon * std::log(b));
    if (it % 10 == 0 || it == max_iter - 1) {
      for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
          pi(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / epsilon);
      double viol = TransportPlan{pi}.marginal_violation();
      if (viol <= 1e-9) {
        converged = true;
        break;
      }
    }
  }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      pi(i, j) = std::exp((f(i) + g(j) - cost(i, j)) / epsilon);

  // Round onto the polytope (scale rows/cols, absorb residual rank-1).
  for (int i = 0; i < n1; ++i) {
    double r = pi.row(i).sum();
    if (r > a) pi.row(i) *= a / r;
  }
  for (int j = 0; j < n2; ++j) {
    double c = pi.col(j).sum();
    if (c > b) pi.col(j) *= b / c;
  }
  Vector ea = Vector::Constant(n1, a) - pi.rowwise().sum();
  Vector eb = Vector::Constant(n2, b) - pi.colwise().sum().transpose();
  double mass = ea.sum();
  if (mass > 1e-300) pi += ea * eb.transpose() / mass;

  double value = (cost.array() * pi.array()).sum();
  return SinkhornSolution{TransportPlan{pi}, value, converged};
}

TransportPlan product_plan(int n1, int n2) {
  return TransportPlan{Matrix::Constant(n1, n2, 1.0 / (n1 * n2))};
}

TransportPlan random_plan(int n1, int n2, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Matrix cost(n1, n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) cost(i, j) = unif(rng);
  return solve_sinkhorn(cost, 0.5, 200).plan;
}

}  // namespace fgw
