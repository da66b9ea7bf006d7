#pragma once

#include <filesystem>
#include <vector>

#include "fgw/barycenter.hpp"
#include "fgw/io.hpp"

namespace fgw {

// Fully connected ReLU net with a final softmax; layer l maps
// activations through W[l] x + b[l].
struct MlpParams {
  std::vector<Matrix> W;
  std::vector<Matrix> b;  // column vectors

  int input_dim() const { return static_cast<int>(W.front().cols()); }
  int output_dim() const { return static_cast<int>(W.back().rows()); }
};

MlpParams init_mlp(int input_dim, const std::vector<int>& hidden, int output_dim,
                   Rng& rng);

Vector mlp_forward(const MlpParams& params, const Vector& x);

struct MlpGrads {
  std::vector<Matrix> dW;
  std::vector<Matrix> db;
};

struct NeuralModel {
  MlpParams mlp;
  TemplateSet templates;
  double beta = 0.5;
  int n = 40;  // output resolution
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 8;
  double lr_mlp = 1e-3;
  double lr_templates = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  bool learn_templates = true;
  bool clamp_template_features = false;  // to the training feature bounding box
  BarycenterOptions bary;
  FgwOptions loss_fgw;
};

enum class TemplateInit { RandomUniform, FromTraining };

TemplateSet init_templates(int M, const std::vector<int>& sizes, int d,
                           TemplateInit mode, std::uint64_t seed,
                           const std::vector<LabeledGraph>* training = nullptr);

BarycenterResult model_forward(const NeuralModel& model, const Vector& x,
                               const BarycenterOptions& opts);

struct LossGrads {
  double loss = 0.0;
  MlpGrads mlp;
  std::vector<Matrix> dC;  // per template
  std::vector<Matrix> dF;
};

struct Sample {
  Vector x;
  RelaxedGraph target;
};

// Mean FGW^2 loss over the batch; all OT plans treated as constants.
LossGrads loss_and_grads(const NeuralModel& model,
                         const std::vector<Sample>& batch,
                         const TrainConfig& config);

struct AdamState {
  std::vector<Matrix> m, v;
  long t = 0;
};

// One Adam update of `params` in place; slots of `state` match `grads`.
void adam_step(AdamState& state, std::vector<Matrix*> params,
               const std::vector<Matrix>& grads, double lr,
               const TrainConfig& config);

// Symmetrize then clamp template adjacencies to [0,1].
void project_template_structure(Matrix& C);

struct TrainResult {
  std::vector<double> epoch_loss;
};

TrainResult train(NeuralModel& model, const Dataset& dataset,
                  const TrainConfig& config);

void save_checkpoint(const NeuralModel& model, const TrainConfig& config,
                     const std::filesystem::path& path);
NeuralModel load_checkpoint(const std::filesystem::path& path,
                            TrainConfig* config = nullptr);

}  // namespace fgw
