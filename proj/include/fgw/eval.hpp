#pragma once

#include <map>
#include <string>
#include <vector>

#include "fgw/krr.hpp"

namespace fgw {

struct TestPoint {
  Vector x;
  std::vector<RelaxedGraph> candidates;
  int truth_index = -1;  // -1: truth absent from the candidate list
};

struct EvalReport {
  std::vector<int> ks;
  std::vector<double> accuracy;  // accuracy[i] = Top-ks[i]
};

EvalReport eval_topk(const KrrModel& model, const std::vector<TestPoint>& test,
                     double beta, int top_k, const std::vector<int>& ks,
                     const FgwOptions& fgw_opts = {});

struct InterpPoint {
  double d_min = 0.0;
  int count = 0;
  double mean_d0 = 0.0;        // closest-template distance to truth
  double mean_fgw_pred = 0.0;  // barycenter prediction distance to truth
};

// d0(x) = FGW^2 from the highest-weighted template to the truth; the curve
// restricts to test points with d0 > d_min for each threshold.
std::vector<InterpPoint> eval_interp(
    const KrrModel& model, const std::vector<Vector>& inputs,
    const std::vector<RelaxedGraph>& truths, const std::vector<double>& d_min_grid,
    double beta, int top_k, int n_out, const BarycenterOptions& bary_opts = {});

struct SweepRow {
  int keep = 0;
  EvalReport report;
};

std::vector<SweepRow> eval_weights_sweep(const KrrModel& model,
                                         const std::vector<TestPoint>& test,
                                         double beta,
                                         const std::vector<int>& keep_list,
                                         const std::vector<int>& ks,
                                         const FgwOptions& fgw_opts = {});

// key=value configuration files; '#' starts a comment.
using Config = std::map<std::string, std::string>;
Config parse_config_file(const std::string& path);
std::string config_hash(const Config& cfg);

// CSV emission: "# config_hash=<hex>" line, then header, then rows.
void write_csv(const std::string& path, const std::string& hash,
               const std::string& header,
               const std::vector<std::string>& rows);

}  // namespace fgw
