#pragma once

#include <optional>
#include <vector>

#include "fgw/fgw.hpp"
#include "fgw/graph.hpp"

namespace fgw {

struct TemplateSet {
  std::vector<RelaxedGraph> templates;

  int size() const { return static_cast<int>(templates.size()); }
  int d() const { return templates.empty() ? 0 : templates[0].d(); }
};

struct BarycenterResult {
  RelaxedGraph graph;
  std::vector<TransportPlan> plans;  // template j -> barycenter, n_j x n
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;
};

enum class BarycenterInit { LargestWeightTemplate, Random };

struct BarycenterOptions {
  int max_outer = 100;
  double tol = 1e-7;
  BarycenterInit init = BarycenterInit::LargestWeightTemplate;
  std::uint64_t seed = 0;
  FgwOptions fgw;  // inner solver settings
};

// Drop negative weights and renormalize to sum 1; errors if nothing remains.
Vector normalize_weights(const Vector& weights);

// C = n^2 sum_j w_j pi_j^T Cbar_j pi_j, clamped to [0,1].
Matrix update_structure(const std::vector<TransportPlan>& plans,
                        const TemplateSet& templates, const Vector& weights,
                        int n);

// F = n sum_j w_j pi_j^T Fbar_j.
Matrix update_features(const std::vector<TransportPlan>& plans,
                       const TemplateSet& templates, const Vector& weights,
                       int n);

BarycenterResult solve_barycenter(const TemplateSet& templates,
                                  const Vector& weights, int n, double beta,
                                  const BarycenterOptions& opts = {});

}  // namespace fgw
