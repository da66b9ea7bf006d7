#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fgw/eval.hpp"
#include "fgw/neural.hpp"
#include "fgw/synthgen.hpp"

namespace py = pybind11;
using namespace fgw;

namespace {

TemplateSet to_templates(const std::vector<std::pair<Matrix, Matrix>>& pairs) {
  TemplateSet set;
  for (const auto& [C, F] : pairs)
    set.templates.push_back(new_relaxed_graph(C, F));
  return set;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal-transport graph barycenters and supervised prediction";

  py::register_exception<Error>(m, "FgwError");

  m.def(
      "solve_exact",
      [](const Matrix& cost) {
        OtSolution sol = solve_exact(cost);
        return py::make_tuple(sol.value, sol.plan.pi);
      },
      py::arg("cost"),
      "Exact optimal transport under uniform marginals; returns (value, plan).");

  m.def(
      "solve_sinkhorn",
      [](const Matrix& cost, double epsilon, int max_iter) {
        SinkhornSolution sol = solve_sinkhorn(cost, epsilon, max_iter);
        return py::make_tuple(sol.value, sol.plan.pi, sol.converged);
      },
      py::arg("cost"), py::arg("epsilon"), py::arg("max_iter") = 10000,
      "Entropic transport; returns (value, plan, converged).");

  m.def(
      "solve_fgw",
      [](const Matrix& C1, const Matrix& F1, const Matrix& C2,
         const Matrix& F2, double beta, int max_iter, double tol, int restarts,
         std::uint64_t seed) {
        FgwProblem p =
            make_problem(new_relaxed_graph(C1, F1), new_relaxed_graph(C2, F2),
                         beta);
        FgwOptions opts;
        opts.max_iter = max_iter;
        opts.tol = tol;
        opts.restarts = restarts;
        opts.seed = seed;
        FgwSolution sol = solve_fgw(p, opts);
        return py::make_tuple(sol.value, sol.plan.pi, sol.iterations,
                              sol.converged);
      },
      py::arg("C1"), py::arg("F1"), py::arg("C2"), py::arg("F2"),
      py::arg("beta") = 0.5, py::arg("max_iter") = 500, py::arg("tol") = 1e-9,
      py::arg("restarts") = 1, py::arg("seed") = 0,
      "Squared fused distance between two labeled graphs; returns "
      "(value, plan, iterations, converged).");

  m.def(
      "solve_barycenter",
      [](const std::vector<std::pair<Matrix, Matrix>>& templates,
         const Vector& weights, int n, double beta, int max_outer, double tol,
         std::uint64_t seed) {
        BarycenterOptions opts;
        opts.max_outer = max_outer;
        opts.tol = tol;
        opts.seed = seed;
        BarycenterResult res =
            solve_barycenter(to_templates(templates), weights, n, beta, opts);
        return py::make_tuple(res.graph.C, res.graph.F, res.objective);
      },
      py::arg("templates"), py::arg("weights"), py::arg("n"),
      py::arg("beta") = 0.5, py::arg("max_outer") = 100, py::arg("tol") = 1e-7,
      py::arg("seed") = 0,
      "Weighted barycenter of (C, F) templates at resolution n; returns "
      "(C, F, objective).");

  m.def(
      "sample_sbm",
      [](double x, std::uint64_t seed, bool one_hot) {
        Rng rng(seed);
        LabeledGraph g = sample_sbm_graph(x, rng, one_hot);
        return py::make_tuple(g.C, g.F);
      },
      py::arg("x"), py::arg("seed") = 0, py::arg("one_hot") = false,
      "One block-model graph at scalar input x in [1, 6]; returns (C, F).");

  m.def(
      "make_dataset",
      [](int N, std::uint64_t seed, bool one_hot) {
        Dataset ds = make_sbm_dataset(N, seed, one_hot);
        std::vector<py::tuple> out;
        for (int i = 0; i < ds.size(); ++i)
          out.push_back(py::make_tuple(ds.inputs[i](0), ds.graphs[i].C,
                                       ds.graphs[i].F));
        return out;
      },
      py::arg("n_samples"), py::arg("seed") = 0, py::arg("one_hot") = false,
      "Synthetic dataset; returns a list of (x, C, F).");

  py::class_<KrrModel>(m, "Krr")
      .def(py::init([](const std::vector<double>& X,
                       const std::vector<std::pair<Matrix, Matrix>>& graphs,
                       double lam, double gamma) {
             std::vector<Vector> inputs;
             for (double x : X) {
               Vector v(1);
               v << x;
               inputs.push_back(v);
             }
             std::vector<RelaxedGraph> targets;
             for (const auto& [C, F] : graphs)
               targets.push_back(new_relaxed_graph(C, F));
             return fit_krr(Kernel::gaussian(gamma), inputs, targets, lam);
           }),
           py::arg("inputs"), py::arg("graphs"), py::arg("lam") = 1e-3,
           py::arg("gamma") = 1.0)
      .def(
          "weights",
          [](const KrrModel& model, double x) {
            Vector v(1);
            v << x;
            return weights_at(model, v);
          },
          py::arg("x"), "Raw barycentric weights at x.")
      .def(
          "predict",
          [](const KrrModel& model, double x, int n, double beta, int top_k) {
            Vector v(1);
            v << x;
            RelaxedGraph g = predict(model, v, n, beta, top_k);
            return py::make_tuple(g.C, g.F);
          },
          py::arg("x"), py::arg("n") = 40, py::arg("beta") = 0.5,
          py::arg("top_k") = 5,
          "Barycentric prediction at x; returns (C, F).")
      .def(
          "decode",
          [](const KrrModel& model, double x,
             const std::vector<std::pair<Matrix, Matrix>>& candidates,
             double beta, int top_k) {
            Vector v(1);
            v << x;
            std::vector<RelaxedGraph> cands;
            for (const auto& [C, F] : candidates)
              cands.push_back(new_relaxed_graph(C, F));
            return decode_candidates(model, v, cands, beta, top_k);
          },
          py::arg("x"), py::arg("candidates"), py::arg("beta") = 0.5,
          py::arg("top_k") = 5,
          "Rank candidates by weighted distance; returns [(index, score)].");

  m.def(
      "serialize_graph",
      [](const Matrix& C, const Matrix& F) {
        return serialize_graph(new_relaxed_graph(C, F));
      },
      py::arg("C"), py::arg("F"));
  m.def(
      "deserialize_graph",
      [](const std::string& text) {
        RelaxedGraph g = deserialize_graph(text);
        return py::make_tuple(g.C, g.F);
      },
      py::arg("text"));
}
