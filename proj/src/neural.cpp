#include "fgw/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

namespace fgw {

namespace {

using nlohmann::json;

struct MlpCache {
  Vector x;
  std::vector<Vector> pre;   // pre-activation per layer
  std::vector<Vector> post;  // post-activation (ReLU), last = logits
  Vector alpha;
};

Vector softmax(const Vector& logits) {
  Vector z = logits.array() - logits.maxCoeff();
  Vector e = z.array().exp();
  return e / e.sum();
}

Vector forward_cached(const MlpParams& p, const Vector& x, MlpCache& cache) {
  if (x.size() != p.input_dim())
    fail(ErrorKind::DimMismatch, "input width does not match network");
  cache.x = x;
  cache.pre.clear();
  cache.post.clear();
  Vector a = x;
  int L = static_cast<int>(p.W.size());
  for (int l = 0; l < L; ++l) {
    Vector z = p.W[l] * a + p.b[l].col(0);
    cache.pre.push_back(z);
    a = (l + 1 < L) ? z.cwiseMax(0.0).eval() : z;
    cache.post.push_back(a);
  }
  cache.alpha = softmax(a);
  return cache.alpha;
}

MlpGrads backward(const MlpParams& p, const MlpCache& cache,
                  const Vector& dalpha) {
  int L = static_cast<int>(p.W.size());
  MlpGrads g;
  g.dW.resize(L);
  g.db.resize(L);
  // Softmax Jacobian: dlogits = alpha .* (dalpha - <dalpha, alpha>).
  const Vector& a = cache.alpha;
  Vector dz = a.array() * (dalpha.array() - dalpha.dot(a));
  for (int l = L - 1; l >= 0; --l) {
    const Vector& input = (l == 0) ? cache.x : cache.post[l - 1];
    g.dW[l] = dz * input.transpose();
    g.db[l] = dz;
    if (l > 0) {
      Vector da = p.W[l].transpose() * dz;
      dz = (cache.pre[l - 1].array() > 0.0).select(da, 0.0);
    }
  }
  return g;
}

void accumulate(MlpGrads& into, const MlpGrads& from, double scale) {
  if (into.dW.empty()) {
    into.dW.resize(from.dW.size());
    into.db.resize(from.db.size());
    for (size_t l = 0; l < from.dW.size(); ++l) {
      into.dW[l] = scale * from.dW[l];
      into.db[l] = scale * from.db[l];
    }
    return;
  }
  for (size_t l = 0; l < from.dW.size(); ++l) {
    into.dW[l] += scale * from.dW[l];
    into.db[l] += scale * from.db[l];
  }
}

json matrix_to_json(const Matrix& m) {
  json a = json::array();
  a.push_back(m.rows());
  a.push_back(m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Matrix matrix_from_json(const json& a) {
  int rows = a[0].get<int>(), cols = a[1].get<int>();
  Matrix m(rows, cols);
  int k = 2;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = a[k++].get<double>();
  return m;
}

}  // namespace

MlpParams init_mlp(int input_dim, const std::vector<int>& hidden,
                   int output_dim, Rng& rng) {
  std::vector<int> widths;
  widths.push_back(input_dim);
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(output_dim);
  std::normal_distribution<double> normal(0.0, 1.0);
  MlpParams p;
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    double scale = std::sqrt(2.0 / widths[l]);
    Matrix W(widths[l + 1], widths[l]);
    for (int i = 0; i < W.rows(); ++i)
      for (int j = 0; j < W.cols(); ++j) W(i, j) = scale * normal(rng);
    p.W.push_back(W);
    p.b.push_back(Matrix::Zero(widths[l + 1], 1));
  }
  return p;
}

Vector mlp_forward(const MlpParams& params, const Vector& x) {
  MlpCache cache;
  return forward_cached(params, x, cache);
}

TemplateSet init_templates(int M, const std::vector<int>& sizes, int d,
                           TemplateInit mode, std::uint64_t seed,
                           const std::vector<LabeledGraph>* training) {
  if (M < 1 || static_cast<int>(sizes.size()) != M)
    fail(ErrorKind::OutOfRange, "need one size per template");
  Rng rng(seed);
  TemplateSet set;
  if (mode == TemplateInit::FromTraining) {
    if (!training || static_cast<int>(training->size()) < M)
      fail(ErrorKind::InsufficientTrainingData,
           "not enough training graphs to draw templates");
    std::vector<int> idx(training->size());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int j = 0; j < M; ++j) set.templates.push_back(relax((*training)[idx[j]]));
    return set;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int j = 0; j < M; ++j) {
    int nj = sizes[j];
    Matrix C(nj, nj);
    for (int i = 0; i < nj; ++i)
      for (int k = i; k < nj; ++k) C(i, k) = C(k, i) = unif(rng);
    Matrix F(nj, d);
    for (int i = 0; i < nj; ++i)
      for (int k = 0; k < d; ++k) F(i, k) = unif(rng);
    set.templates.push_back(RelaxedGraph{C, F});
  }
  return set;
}

BarycenterResult model_forward(const NeuralModel& model, const Vector& x,
                               const BarycenterOptions& opts) {
  Vector alpha = mlp_forward(model.mlp, x);
  return solve_barycenter(model.templates, alpha, model.n, model.beta, opts);
}

LossGrads loss_and_grads(const NeuralModel& model,
                         const std::vector<Sample>& batch,
                         const TrainConfig& config) {
  if (batch.empty()) fail(ErrorKind::OutOfRange, "empty batch");
  int M = model.templates.size();
  int n = model.n;
  double nn = static_cast<double>(n) * n;
  double inv_batch = 1.0 / batch.size();

  LossGrads out;
  out.dC.resize(M);
  out.dF.resize(M);
  for (int j = 0; j < M; ++j) {
    const auto& t = model.templates.templates[j];
    out.dC[j] = Matrix::Zero(t.n(), t.n());
    out.dF[j] = Matrix::Zero(t.n(), t.d());
  }

  for (const Sample& sample : batch) {
    MlpCache cache;
    Vector alpha = forward_cached(model.mlp, sample.x, cache);
    BarycenterResult bary =
        solve_barycenter(model.templates, alpha, n, model.beta, config.bary);

    FgwProblem prob = make_problem(bary.graph, sample.target, model.beta);
    FgwSolution sol = solve_fgw(prob, config.loss_fgw);
    out.loss += inv_batch * sol.value;

    // Outer-loss gradient at the barycenter, plans held fixed.
    FixedPlanGrad g = grad_fixed_plan(prob, sol.plan.pi);

    // Chain through the linear barycenter maps.
    Vector dalpha = Vector::Zero(M);
    for (int j = 0; j < M; ++j) {
      const auto& t = model.templates.templates[j];
      const Matrix& pij = bary.plans[j].pi;
      Matrix Bj = nn * (pij.transpose() * t.C * pij);
      Matrix Aj = static_cast<double>(n) * (pij.transpose() * t.F);
      dalpha(j) = (g.dC1.array() * Bj.array()).sum() +
                  (g.dF1.array() * Aj.array()).sum();
      out.dC[j] += inv_batch * nn * alpha(j) * (pij * g.dC1 * pij.transpose());
      out.dF[j] += inv_batch * static_cast<double>(n) * alpha(j) * (pij * g.dF1);
    }
    MlpGrads mg = backward(model.mlp, cache, dalpha);
    accumulate(out.mlp, mg, inv_batch);
  }
  return out;
}

void adam_step(AdamState& state, std::vector<Matrix*> params,
               const std::vector<Matrix>& grads, double lr,
               const TrainConfig& config) {
  if (params.size() != grads.size())
    fail(ErrorKind::ShapeMismatch, "parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const Matrix& g : grads) {
      state.m.push_back(Matrix::Zero(g.rows(), g.cols()));
      state.v.push_back(Matrix::Zero(g.rows(), g.cols()));
    }
  }
  ++state.t;
  double b1 = config.adam_beta1, b2 = config.adam_beta2;
  double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (size_t k = 0; k < params.size(); ++k) {
    if (params[k]->rows() != grads[k].rows() ||
        params[k]->cols() != grads[k].cols())
      fail(ErrorKind::ShapeMismatch, "gradient shape mismatch");
    state.m[k] = b1 * state.m[k] + (1.0 - b1) * grads[k];
    state.v[k] = b2 * state.v[k] +
                 (1.0 - b2) * grads[k].array().square().matrix();
    Matrix mhat = state.m[k] / bc1;
    Matrix vhat = state.v[k] / bc2;
    params[k]->array() -=
        lr * mhat.array() / (vhat.array().sqrt() + config.adam_eps);
  }
}

void project_template_structure(Matrix& C) {
  C = (0.5 * (C + C.transpose())).eval();
  C = C.cwiseMax(0.0).cwiseMin(1.0);
}

TrainResult train(NeuralModel& model, const Dataset& dataset,
                  const TrainConfig& config) {
  int N = dataset.size();
  if (N < 1) fail(ErrorKind::InsufficientTrainingData, "empty dataset");
  if (config.lr_mlp < 0.0 || config.lr_templates < 0.0)
    fail(ErrorKind::OutOfRange, "learning rates must be nonnegative");

  std::vector<Sample> samples(N);
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
  for (int i = 0; i < N; ++i) {
    samples[i] = Sample{dataset.inputs[i], relax(dataset.graphs[i])};
    fmin = std::min(fmin, dataset.graphs[i].F.minCoeff());
    fmax = std::max(fmax, dataset.graphs[i].F.maxCoeff());
  }

  Rng rng(config.seed);
  AdamState mlp_state, template_state;
  TrainResult result;
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int covered = 0;
    for (int start = 0; start < N; start += config.batch_size) {
      int stop = std::min(N, start + config.batch_size);
      std::vector<Sample> batch;
      for (int k = start; k < stop; ++k) batch.push_back(samples[order[k]]);
      LossGrads g = loss_and_grads(model, batch, config);
      epoch_loss += g.loss * batch.size();
      covered += static_cast<int>(batch.size());

      std::vector<Matrix*> mlp_params;
      std::vector<Matrix> mlp_grads;
      for (size_t l = 0; l < model.mlp.W.size(); ++l) {
        mlp_params.push_back(&model.mlp.W[l]);
        mlp_grads.push_back(g.mlp.dW[l]);
        mlp_params.push_back(&model.mlp.b[l]);
        mlp_grads.push_back(g.mlp.db[l]);
      }
      adam_step(mlp_state, mlp_params, mlp_grads, config.lr_mlp, config);

      if (config.learn_templates) {
        std::vector<Matrix*> t_params;
        std::vector<Matrix> t_grads;
        for (int j = 0; j < model.templates.size(); ++j) {
          t_params.push_back(&model.templates.templates[j].C);
          t_grads.push_back(g.dC[j]);
          t_params.push_back(&model.templates.templates[j].F);
          t_grads.push_back(g.dF[j]);
        }
        adam_step(template_state, t_params, t_grads, config.lr_templates,
                  config);
        for (auto& t : model.templates.templates) {
          project_template_structure(t.C);
          if (config.clamp_template_features)
            t.F = t.F.cwiseMax(fmin).cwiseMin(fmax);
        }
      }
    }
    result.epoch_loss.push_back(epoch_loss / covered);
  }
  return result;
}

void save_checkpoint(const NeuralModel& model, const TrainConfig& config,
                     const std::filesystem::path& path) {
  json doc;
  doc["version"] = 1;
  doc["beta"] = model.beta;
  doc["n"] = model.n;
  json mlp = json::array();
  for (size_t l = 0; l < model.mlp.W.size(); ++l) {
    json layer;
    layer["W"] = matrix_to_json(model.mlp.W[l]);
    layer["b"] = matrix_to_json(model.mlp.b[l]);
    mlp.push_back(layer);
  }
  doc["mlp"] = mlp;
  json tpl = json::array();
  for (const auto& t : model.templates.templates) {
    json tj;
    tj["C"] = matrix_to_json(t.C);
    tj["F"] = matrix_to_json(t.F);
    tpl.push_back(tj);
  }
  doc["templates"] = tpl;
  doc["config"] = {{"epochs", config.epochs},
                   {"batch_size", config.batch_size},
                   {"lr_mlp", config.lr_mlp},
                   {"lr_templates", config.lr_templates},
                   {"seed", config.seed},
                   {"learn_templates", config.learn_templates}};
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

NeuralModel load_checkpoint(const std::filesystem::path& path,
                            TrainConfig* config) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded())
    fail(ErrorKind::ParseError, "malformed checkpoint");
  if (doc.value("version", -1) != 1)
    fail(ErrorKind::SchemaVersionMismatch, "unsupported checkpoint version");
  NeuralModel model;
  model.beta = doc["beta"].get<double>();
  model.n = doc["n"].get<int>();
  for (const auto& layer : doc["mlp"]) {
    model.mlp.W.push_back(matrix_from_json(layer["W"]));
    model.mlp.b.push_back(matrix_from_json(layer["b"]));
  }
  for (const auto& tj : doc["templates"])
    model.templates.templates.push_back(
        RelaxedGraph{matrix_from_json(tj["C"]), matrix_from_json(tj["F"])});
  if (config && doc.contains("config")) {
    const auto& c = doc["config"];
    config->epochs = c.value("epochs", config->epochs);
    config->batch_size = c.value("batch_size", config->batch_size);
    config->lr_mlp = c.value("lr_mlp", config->lr_mlp);
    config->lr_templates = c.value("lr_templates", config->lr_templates);
    config->seed = c.value("seed", config->seed);
    config->learn_templates =
        c.value("learn_templates", config->learn_templates);
  }
  return model;
}

}  // namespace fgw
