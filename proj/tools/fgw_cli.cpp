#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fgw/eval.hpp"
#include "fgw/neural.hpp"
#include "fgw/synthgen.hpp"

namespace fs = std::filesystem;
using namespace fgw;

namespace {

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

Config merge_cli(const Config& file_cfg,
                 const std::vector<std::pair<std::string, std::string>>& cli) {
  Config cfg = file_cfg;
  for (const auto& [k, v] : cli) cfg[k] = v;  // flags override config
  return cfg;
}

double cfg_get(const Config& cfg, const std::string& key, double fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : std::stod(it->second);
}

int cfg_get(const Config& cfg, const std::string& key, int fallback) {
  auto it = cfg.find(key);
  return it == cfg.end() ? fallback : std::stoi(it->second);
}

bool graphs_equal(const RelaxedGraph& a, const RelaxedGraph& b) {
  return a.n() == b.n() && a.d() == b.d() && a.C == b.C && a.F == b.F;
}

// KRR model file: hyperparameters plus the dataset it was fitted on.
void save_krr_model(const fs::path& path, const fs::path& manifest,
                    double lambda, double gamma, double beta, int top_k,
                    double val_top1) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "type = krr\n"
      << "dataset = " << fs::absolute(manifest).string() << "\n"
      << "lambda = " << fmt(lambda) << "\n"
      << "gamma = " << fmt(gamma) << "\n"
      << "beta = " << fmt(beta) << "\n"
      << "top_k = " << top_k << "\n"
      << "validation_top1 = " << fmt(val_top1) << "\n";
}

KrrModel load_krr_model(const fs::path& path, double* beta, int* top_k) {
  Config cfg = parse_config_file(path.string());
  if (cfg.count("type") == 0 || cfg["type"] != "krr")
    fail(ErrorKind::ParseError, "not a krr model file: " + path.string());
  Dataset ds = load_dataset(cfg.at("dataset"));
  std::vector<RelaxedGraph> graphs;
  for (const auto& g : ds.graphs) graphs.push_back(relax(g));
  double gamma = std::stod(cfg.at("gamma"));
  double lambda = std::stod(cfg.at("lambda"));
  if (beta) *beta = std::stod(cfg.at("beta"));
  if (top_k) *top_k = std::stoi(cfg.at("top_k"));
  return fit_krr(Kernel::gaussian(gamma), ds.inputs, graphs, lambda);
}

std::vector<TestPoint> build_test_points(const Dataset& test,
                                         const fs::path& candidates) {
  auto sets = load_candidate_sets(candidates, test.size());
  std::vector<TestPoint> points;
  for (int i = 0; i < test.size(); ++i) {
    TestPoint tp;
    tp.x = test.inputs[i];
    tp.candidates = sets[i];
    RelaxedGraph truth = relax(test.graphs[i]);
    for (int c = 0; c < static_cast<int>(tp.candidates.size()); ++c)
      if (graphs_equal(tp.candidates[c], truth)) {
        tp.truth_index = c;
        break;
      }
    points.push_back(std::move(tp));
  }
  return points;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Graph prediction with optimal-transport barycenters"};
  app.require_subcommand(1);

  std::string config_path, dataset_path, out_path, model_path, test_path;
  std::string candidates_path, input_str, n_out_str = "40";
  std::string ks_str = "1,10,20", keep_str, lambda_grid_str, gamma_grid_str;
  std::string d_min_str = "0";
  std::uint64_t seed = 0;
  double beta = 0.5;
  int top_k = 5;
  int n_samples = 50;
  bool one_hot = false;
  int sample_count = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed);
    cmd->add_option("--beta", beta);
    cmd->add_option("--top-k", top_k);
    cmd->add_option("--config", config_path);
  };

  auto* gen = app.add_subcommand("generate", "Sample a synthetic SBM dataset");
  gen->add_option("--n-samples", n_samples);
  gen->add_option("--out", out_path)->required();
  gen->add_flag("--one-hot", one_hot);
  add_common(gen);

  auto* tr = app.add_subcommand("train-neural", "Train the neural predictor");
  tr->add_option("--dataset", dataset_path)->required();
  tr->add_option("--out", out_path)->required();
  add_common(tr);

  auto* fk = app.add_subcommand("fit-krr", "Grid-search and fit KRR weights");
  fk->add_option("--dataset", dataset_path)->required();
  fk->add_option("--out", out_path)->required();
  fk->add_option("--lambda-grid", lambda_grid_str);
  fk->add_option("--gamma-grid", gamma_grid_str);
  add_common(fk);

  auto* pr = app.add_subcommand("predict", "Predict graphs for given inputs");
  pr->add_option("--model", model_path)->required();
  pr->add_option("--input", input_str)->required();
  pr->add_option("--n-out", n_out_str);
  pr->add_option("--out", out_path)->required();
  pr->add_option("--samples", sample_count);
  add_common(pr);

  auto* et = app.add_subcommand("eval-topk", "Candidate-set Top-k accuracy");
  et->add_option("--model", model_path)->required();
  et->add_option("--test", test_path)->required();
  et->add_option("--candidates", candidates_path)->required();
  et->add_option("--ks", ks_str);
  et->add_option("--out", out_path)->required();
  add_common(et);

  auto* ei = app.add_subcommand("eval-interp", "Interpolation-difficulty curve");
  ei->add_option("--model", model_path)->required();
  ei->add_option("--test", test_path)->required();
  ei->add_option("--d-min-grid", d_min_str);
  ei->add_option("--n-out", n_out_str);
  ei->add_option("--out", out_path)->required();
  add_common(ei);

  auto* ew = app.add_subcommand("eval-weights-sweep",
                                "Top-k vs number of kept weights");
  ew->add_option("--model", model_path)->required();
  ew->add_option("--test", test_path)->required();
  ew->add_option("--candidates", candidates_path)->required();
  ew->add_option("--keep", keep_str)->required();
  ew->add_option("--ks", ks_str);
  ew->add_option("--out", out_path)->required();
  add_common(ew);

  CLI11_PARSE(app, argc, argv);

  Config file_cfg =
      config_path.empty() ? Config{} : parse_config_file(config_path);

  if (gen->parsed()) {
    if (n_samples < 1) fail(ErrorKind::OutOfRange, "--n-samples must be >= 1");
    Dataset ds = make_sbm_dataset(n_samples, seed, one_hot);
    save_dataset(ds, out_path);
    std::cout << "wrote " << ds.size() << " samples to " << out_path << "\n";
    return 0;
  }

  if (tr->parsed()) {
    Dataset ds = load_dataset(dataset_path);
    Config cfg = merge_cli(file_cfg, {{"seed", std::to_string(seed)},
                                      {"beta", fmt(beta)}});
    TrainConfig config;
    config.epochs = cfg_get(cfg, "epochs", 200);
    config.batch_size = cfg_get(cfg, "batch_size", 8);
    config.lr_mlp = cfg_get(cfg, "lr_mlp", 1e-3);
    config.lr_templates = cfg_get(cfg, "lr_templates", 1e-2);
    config.seed = static_cast<std::uint64_t>(cfg_get(cfg, "seed", 0));
    config.learn_templates = cfg_get(cfg, "learn_templates", 1) != 0;
    config.bary.max_outer = cfg_get(cfg, "bary_max_outer", 5);
    config.bary.tol = cfg_get(cfg, "bary_tol", 1e-5);
    config.bary.fgw.max_iter = cfg_get(cfg, "fgw_max_iter", 100);
    config.bary.fgw.tol = cfg_get(cfg, "fgw_tol", 1e-7);
    config.loss_fgw = config.bary.fgw;

    int M = cfg_get(cfg, "templates", 10);
    int template_nodes = cfg_get(cfg, "template_nodes", 5);
    int n_out = cfg_get(cfg, "n_out", 40);
    double b = cfg_get(cfg, "beta", 0.5);
    int input_dim = static_cast<int>(ds.inputs[0].size());

    Rng rng(config.seed);
    NeuralModel model;
    model.beta = b;
    model.n = n_out;
    model.mlp = init_mlp(input_dim, {100, 100}, M, rng);
    model.templates =
        init_templates(M, std::vector<int>(M, template_nodes), ds.graphs[0].d(),
                       TemplateInit::RandomUniform, config.seed + 1);

    TrainResult res = train(model, ds, config);
    save_checkpoint(model, config, out_path);
    std::vector<std::string> rows;
    for (size_t e = 0; e < res.epoch_loss.size(); ++e)
      rows.push_back(std::to_string(e) + "," + fmt(res.epoch_loss[e]));
    write_csv(out_path + ".loss.csv", config_hash(cfg), "epoch,mean_fgw_loss",
              rows);
    std::cout << "final epoch loss " << res.epoch_loss.back() << "\n";
    return 0;
  }

  if (fk->parsed()) {
    Dataset ds = load_dataset(dataset_path);
    if (ds.size() < 2)
      fail(ErrorKind::InsufficientTrainingData,
           "need at least 2 samples to fit");
    std::vector<double> lambdas =
        lambda_grid_str.empty()
            ? std::vector<double>{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1, 10, 100}
            : parse_double_list(lambda_grid_str);
    std::vector<double> gammas =
        gamma_grid_str.empty()
            ? std::vector<double>{1e-3, 1e-2, 1e-1, 1, 10, 100}
            : parse_double_list(gamma_grid_str);
    std::vector<RelaxedGraph> graphs;
    for (const auto& g : ds.graphs) graphs.push_back(relax(g));
    KrrGridResult sel =
        select_hyperparams(ds.inputs, graphs, lambdas, gammas, beta, top_k);
    save_krr_model(out_path, dataset_path, sel.lambda, sel.gamma, beta, top_k,
                   sel.validation_top1);
    std::cout << "selected lambda=" << sel.lambda << " gamma=" << sel.gamma
              << " validation_top1=" << sel.validation_top1 << "\n";
    return 0;
  }

  if (pr->parsed()) {
    if (!fs::exists(model_path))
      fail(ErrorKind::IoError, "model file not found: " + model_path);
    std::vector<int> n_list = parse_int_list(n_out_str);
    Vector x;
    {
      std::vector<double> vals = parse_double_list(input_str);
      x = Eigen::Map<Vector>(vals.data(), static_cast<int>(vals.size()));
    }
    fs::create_directories(out_path);
    bool is_krr = false;
    {
      std::ifstream probe(model_path);
      std::string head;
      std::getline(probe, head);
      is_krr = head.rfind("type", 0) == 0;
    }
    BarycenterOptions bopts;
    for (int n : n_list) {
      RelaxedGraph pred;
      if (is_krr) {
        double model_beta = beta;
        int model_top_k = top_k;
        KrrModel model = load_krr_model(model_path, &model_beta, &model_top_k);
        pred = predict(model, x, n, model_beta, model_top_k, bopts);
      } else {
        NeuralModel model = load_checkpoint(model_path);
        model.n = n;
        pred = model_forward(model, x, bopts).graph;
      }
      fs::path base = fs::path(out_path) / ("pred_n" + std::to_string(n));
      save_graph(pred, base.string() + ".fgwg");
      Rng rng(seed);
      for (int s = 0; s < sample_count; ++s) {
        LabeledGraph sample = bernoulli_sample(pred, rng);
        save_graph(relax(sample),
                   base.string() + "_sample" + std::to_string(s) + ".fgwg");
      }
    }
    return 0;
  }

  if (et->parsed()) {
    double model_beta = beta;
    int model_top_k = top_k;
    KrrModel model = load_krr_model(model_path, &model_beta, &model_top_k);
    Dataset test = load_dataset(test_path);
    auto points = build_test_points(test, candidates_path);
    std::vector<int> ks = parse_int_list(ks_str);
    EvalReport report = eval_topk(model, points, model_beta, model_top_k, ks);
    Config cfg = merge_cli(file_cfg, {{"model", model_path},
                                      {"test", test_path},
                                      {"ks", ks_str}});
    std::vector<std::string> rows;
    for (size_t i = 0; i < ks.size(); ++i)
      rows.push_back(std::to_string(ks[i]) + "," + fmt(report.accuracy[i]));
    write_csv(out_path, config_hash(cfg), "k,accuracy", rows);
    for (size_t i = 0; i < ks.size(); ++i)
      std::cout << "top-" << ks[i] << " " << report.accuracy[i] << "\n";
    return 0;
  }

  if (ei->parsed()) {
    double model_beta = beta;
    KrrModel model = load_krr_model(model_path, &model_beta, nullptr);
    Dataset test = load_dataset(test_path);
    std::vector<RelaxedGraph> truths;
    for (const auto& g : test.graphs) truths.push_back(relax(g));
    std::vector<double> grid = parse_double_list(d_min_str);
    std::vector<int> n_list = parse_int_list(n_out_str);
    auto curve = eval_interp(model, test.inputs, truths, grid, model_beta, 10,
                             n_list.front());
    Config cfg = merge_cli(file_cfg, {{"model", model_path},
                                      {"test", test_path},
                                      {"d_min_grid", d_min_str}});
    std::vector<std::string> rows;
    for (const auto& pt : curve)
      rows.push_back(fmt(pt.d_min) + "," + std::to_string(pt.count) + "," +
                     fmt(pt.mean_d0) + "," + fmt(pt.mean_fgw_pred));
    write_csv(out_path, config_hash(cfg),
              "d_min,count,mean_d0,mean_fgw_barycenter", rows);
    return 0;
  }

  if (ew->parsed()) {
    double model_beta = beta;
    KrrModel model = load_krr_model(model_path, &model_beta, nullptr);
    Dataset test = load_dataset(test_path);
    auto points = build_test_points(test, candidates_path);
    std::vector<int> keeps = parse_int_list(keep_str);
    std::vector<int> ks = parse_int_list(ks_str);
    auto rows_data = eval_weights_sweep(model, points, model_beta, keeps, ks);
    Config cfg = merge_cli(file_cfg, {{"model", model_path},
                                      {"test", test_path},
                                      {"keep", keep_str},
                                      {"ks", ks_str}});
    std::vector<std::string> rows;
    for (const auto& row : rows_data)
      for (size_t i = 0; i < ks.size(); ++i)
        rows.push_back(std::to_string(row.keep) + "," +
                       std::to_string(ks[i]) + "," +
                       fmt(row.report.accuracy[i]));
    write_csv(out_path, config_hash(cfg), "keep,k,accuracy", rows);
    return 0;
  }

  return 2;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::OutOfRange:
        return 2;
      case ErrorKind::NumericError:
      case ErrorKind::DidNotConverge:
      case ErrorKind::NonFiniteCost:
      case ErrorKind::NotPositiveDefinite:
        return 4;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
