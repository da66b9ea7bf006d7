#include "fgw/eval.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace fgw {

EvalReport eval_topk(const KrrModel& model, const std::vector<TestPoint>& test,
                     double beta, int top_k, const std::vector<int>& ks,
                     const FgwOptions& fgw_opts) {
  if (test.empty()) fail(ErrorKind::OutOfRange, "empty test set");
  EvalReport report;
  report.ks = ks;
  report.accuracy.assign(ks.size(), 0.0);
  for (const TestPoint& tp : test) {
    auto ranked = decode_candidates(model, tp.x, tp.candidates, beta, top_k,
                                    fgw_opts);
    int rank = -1;
    for (int r = 0; r < static_cast<int>(ranked.size()); ++r)
      if (ranked[r].first == tp.truth_index) {
        rank = r;
        break;
      }
    for (size_t i = 0; i < ks.size(); ++i)
      if (rank >= 0 && rank < ks[i]) report.accuracy[i] += 1.0;
  }
  for (double& a : report.accuracy) a /= test.size();
  return report;
}

std::vector<InterpPoint> eval_interp(
    const KrrModel& model, const std::vector<Vector>& inputs,
    const std::vector<RelaxedGraph>& truths,
    const std::vector<double>& d_min_grid, double beta, int top_k, int n_out,
    const BarycenterOptions& bary_opts) {
  if (inputs.empty() || inputs.size() != truths.size())
    fail(ErrorKind::OutOfRange, "inputs and truths must pair up");
  int nt = static_cast<int>(inputs.size());
  std::vector<double> d0(nt), dpred(nt);
  for (int i = 0; i < nt; ++i) {
    Vector alpha = weights_at(model, inputs[i]);
    int jbest = 0;
    alpha.maxCoeff(&jbest);
    FgwProblem p0 = make_problem(model.graphs[jbest], truths[i], beta);
    d0[i] = solve_fgw(p0, bary_opts.fgw).value;
    RelaxedGraph pred =
        predict(model, inputs[i], n_out, beta,
                std::min(top_k, model.size()), bary_opts);
    FgwProblem pp = make_problem(pred, truths[i], beta);
    dpred[i] = solve_fgw(pp, bary_opts.fgw).value;
  }
  std::vector<InterpPoint> curve;
  for (double dmin : d_min_grid) {
    InterpPoint pt;
    pt.d_min = dmin;
    for (int i = 0; i < nt; ++i) {
      if (d0[i] > dmin) {
        ++pt.count;
        pt.mean_d0 += d0[i];
        pt.mean_fgw_pred += dpred[i];
      }
    }
    if (pt.count == 0) continue;  // empty bucket, no row
    pt.mean_d0 /= pt.count;
    pt.mean_fgw_pred /= pt.count;
    curve.push_back(pt);
  }
  return curve;
}

std::vector<SweepRow> eval_weights_sweep(const KrrModel& model,
                                         const std::vector<TestPoint>& test,
                                         double beta,
                                         const std::vector<int>& keep_list,
                                         const std::vector<int>& ks,
                                         const FgwOptions& fgw_opts) {
  std::vector<SweepRow> rows;
  for (int keep : keep_list) {
    SweepRow row;
    row.keep = keep;
    row.report = eval_topk(model, test, beta, keep, ks, fgw_opts);
    rows.push_back(std::move(row));
  }
  return rows;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config " + path);
  Config cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = val;
  }
  return cfg;
}

std::string config_hash(const Config& cfg) {
  // FNV-1a over the normalized key=value listing.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [k, v] : cfg) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void write_csv(const std::string& path, const std::string& hash,
               const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  out << "# config_hash=" << hash << "\n" << header << "\n";
  for (const auto& row : rows) out << row << "\n";
}

}  // namespace fgw
