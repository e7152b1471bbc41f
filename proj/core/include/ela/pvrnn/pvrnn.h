// Copyright 2026 The ELA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ELA_PVRNN_PVRNN_H_
#define ELA_PVRNN_PVRNN_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ela/common/rng.h"
#include "ela/games/trajectory.h"
#include "ela/nn/adam.h"
#include "ela/nn/layers.h"
#include "ela/nn/params.h"
#include "ela/nn/tape.h"

namespace ela::pvrnn {

using nn::Matrix;
using nn::Var;

struct PvrnnHyper {
  int z_dim = 8;
  int h_dim = 8;
  int r_dim = 8;
  int l_dim = 8;
  int epochs = 100;
  int batch_size = 32;
  double lr = 5e-4;
  // Learning rate for the representation vectors; <= 0 means "same as lr".
  double repr_lr = 0.0;
  // Standard deviation of the initial representation vectors.
  double l_init_std = 0.1;
  int infer_steps = 200;
  double infer_lr = 0.01;

  double EffectiveReprLr() const { return repr_lr > 0.0 ? repr_lr : lr; }
  void Validate() const;
  nlohmann::json ToJson() const;
  static PvrnnHyper FromJson(const nlohmann::json& j);
};

// What the model is allowed to see of a trajectory: observations and actions.
struct Sequence {
  Matrix obs;  // T x obs_width
  std::vector<int> actions;

  int length() const { return static_cast<int>(actions.size()); }
};

Sequence ToSequence(const games::Trajectory& trajectory);
std::vector<Sequence> ToSequences(const games::Dataset& dataset);

struct GaussianVars {
  Var mean;
  Var log_std;
};

struct LossVars {
  Var total;  // 1x1, recon + kl
  Var recon;  // 1x1
  Var kl;     // 1x1
  Var total_rows;  // B x 1, per-sequence totals
};

struct LossValues {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
};

// Network part of the model: featurizers psi_o, psi_a, prior, encoder,
// decoder and the GRU recurrence.
class PvrnnModel {
 public:
  PvrnnModel(int obs_width, int num_actions, const PvrnnHyper& hyper,
             std::uint64_t seed);
  PvrnnModel(PvrnnModel&&) = default;

  int obs_width() const { return obs_width_; }
  int num_actions() const { return num_actions_; }
  const PvrnnHyper& hyper() const { return hyper_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }

  Var FeaturizeObs(nn::Tape& tape, Var obs) const;
  Var FeaturizeAction(nn::Tape& tape, Var action_onehot) const;

  // Inputs below are batched (one row per sequence). o_f / a_f are
  // featurized observation / action rows.
  GaussianVars PriorStep(nn::Tape& tape, Var h_prev, Var o_f, Var l) const;
  GaussianVars EncoderStep(nn::Tape& tape, Var h_prev, Var o_f, Var l,
                           Var a_f) const;
  Var DecoderStep(nn::Tape& tape, Var h_prev, Var z, Var o_f, Var l) const;
  Var RecurrenceStep(nn::Tape& tape, Var h_prev, Var a_f, Var z, Var o_f,
                     Var l) const;

  // Summed loss over a batch of sequences with representation rows `l`
  // (B x l_dim). Shorter sequences are masked after their last step.
  // `rngs` holds either one stream shared by the batch or one per row; noise
  // for row i is drawn from its stream only in the per-row case.
  LossVars BatchLoss(nn::Tape& tape, std::span<const Sequence* const> batch,
                     Var l, std::span<Rng> rngs) const;

  nn::Mlp& prior() { return prior_; }
  nn::Mlp& encoder() { return encoder_; }
  nn::Mlp& decoder() { return decoder_; }
  nn::Gru& recurrence() { return gru_; }

 private:
  int obs_width_;
  int num_actions_;
  PvrnnHyper hyper_;
  nn::ParamStore store_;
  nn::Mlp psi_o_;
  nn::Mlp psi_a_;
  nn::Mlp prior_;
  nn::Mlp encoder_;
  nn::Mlp decoder_;
  nn::Gru gru_;
};

// Loss of one sequence under a fixed representation, evaluated on a fresh
// tape.
LossValues TrajectoryLoss(const PvrnnModel& model, const Sequence& sequence,
                          const Eigen::VectorXd& l, Rng& rng);

// Trainable per-sequence representations with their Adam moments.
struct RepresentationTable {
  Matrix values;  // N x l_dim
  Matrix m;
  Matrix v;
  std::vector<std::int64_t> steps;
};

struct TrainResult {
  PvrnnModel model;
  RepresentationTable table;
  std::vector<double> epoch_loss;  // mean total loss per sequence
};

// Joint training of network parameters and one representation per
// sequence. Deterministic given seed.
TrainResult Train(std::span<const Sequence> sequences, int obs_width,
                  int num_actions, const PvrnnHyper& hyper, std::uint64_t seed);

// Fits fresh representations for `sequences` with the network frozen.
// Sequence i starts from l = 0 and draws its sampling noise from the stream
// DeriveSeed(seed, i).
Matrix InferRepresentations(const PvrnnModel& model,
                            std::span<const Sequence> sequences,
                            std::uint64_t seed);
Eigen::VectorXd InferRepresentation(const PvrnnModel& model,
                                    const Sequence& sequence,
                                    std::uint64_t seed);

void SaveModel(const std::string& path, const PvrnnModel& model);
PvrnnModel LoadModel(const std::string& path);

// Representation CSV: game_id, player_index, demonstrator_tag, l_0..l_{k-1}.
struct RepresentationRow {
  games::TrajectoryKey key;
  std::string tag;
  Eigen::VectorXd l;
};

void WriteRepresentationCsv(const std::string& path,
                            std::span<const RepresentationRow> rows,
                            const std::string& comment);
std::vector<RepresentationRow> ReadRepresentationCsv(const std::string& path);

}  // namespace ela::pvrnn

#endif  // ELA_PVRNN_PVRNN_H_
