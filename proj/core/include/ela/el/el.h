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

#ifndef ELA_EL_EL_H_
#define ELA_EL_EL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ela/nn/layers.h"
#include "ela/nn/params.h"
#include "ela/pvrnn/pvrnn.h"

namespace ela::el {

using nn::Matrix;

struct ElSample {
  Eigen::VectorXd l;
  double reward = 0.0;
};

// Neighbourhood estimate for sample `index`:
//   sum_{d(l, l') < delta} max(-r', 0) / #{d(l, l') < delta, r' <= 0}
// over Euclidean distance, the sample itself included.
double ElDelta(std::size_t index, std::span<const ElSample> samples,
               double delta);

// ElDelta for every sample. Entries with no losing neighbour are NaN unless
// `strict`, in which case the first such entry throws.
std::vector<double> ElDeltaAll(std::span<const ElSample> samples, double delta,
                               bool strict);

// 0.2 x the median pairwise Euclidean distance.
double DefaultDelta(std::span<const ElSample> samples);

struct ElHyper {
  int hidden = 32;
  double lr = 1e-3;
  int epochs = 500;
  int batch_size = 64;

  nlohmann::json ToJson() const;
  static ElHyper FromJson(const nlohmann::json& j);
};

// Learned operator L: l -> estimated EL, a two-layer MLP with a softplus
// head. Targets are divided by their mean during fitting and the output is
// scaled back, so the network works at unit scale.
class ElModel {
 public:
  ElModel(int l_dim, const ElHyper& hyper, std::uint64_t seed);
  ElModel(ElModel&&) = default;

  double Estimate(const Eigen::VectorXd& l) const;
  // Network output at unit target scale.
  nn::Var ForwardUnit(nn::Tape& tape, nn::Var l_rows) const;
  std::vector<double> EstimateRows(const Matrix& l_rows) const;

  int l_dim() const { return l_dim_; }
  const ElHyper& hyper() const { return hyper_; }
  double target_scale() const { return target_scale_; }
  double fitted_min() const { return fitted_min_; }
  double fitted_max() const { return fitted_max_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }

  void set_target_scale(double s) { target_scale_ = s; }
  void set_fitted_range(double lo, double hi) {
    fitted_min_ = lo;
    fitted_max_ = hi;
  }

 private:
  int l_dim_;
  ElHyper hyper_;
  nn::ParamStore store_;
  nn::Mlp mlp_;
  double target_scale_ = 1.0;
  double fitted_min_ = 0.0;
  double fitted_max_ = 0.0;
};

// Fits L on pairs (l, -reward) for samples with reward <= 0 by minibatch Adam
// on squared error. The fitted range is taken over predictions for all
// samples. Throws if no sample has reward <= 0.
ElModel TrainElModel(std::span<const ElSample> samples, const ElHyper& hyper,
                     std::uint64_t seed);

void SaveElModel(const std::string& path, const ElModel& model);
ElModel LoadElModel(const std::string& path);

// Min-max rescaling to [0, 1]; a constant input maps to all zeros.
std::vector<double> NormalizeEl(std::span<const double> estimates);

// Alternative estimator reading raw trajectories: a GRU over
// [observation, action one-hot] whose final hidden state feeds a softplus
// head. Trained on the same (trajectory, -reward) pairs for reward <= 0.
struct GruElHyper {
  int hidden = 16;
  double lr = 1e-3;
  int epochs = 30;
  int batch_size = 64;

  nlohmann::json ToJson() const;
  static GruElHyper FromJson(const nlohmann::json& j);
};

class GruElModel {
 public:
  GruElModel(int obs_width, int num_actions, const GruElHyper& hyper,
             std::uint64_t seed);
  GruElModel(GruElModel&&) = default;

  std::vector<double> EstimateBatch(
      std::span<const pvrnn::Sequence* const> batch) const;
  nn::Var Forward(nn::Tape& tape,
                  std::span<const pvrnn::Sequence* const> batch) const;

  int obs_width() const { return obs_width_; }
  int num_actions() const { return num_actions_; }
  const GruElHyper& hyper() const { return hyper_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }
  double target_scale() const { return target_scale_; }
  void set_target_scale(double s) { target_scale_ = s; }

 private:
  int obs_width_;
  int num_actions_;
  GruElHyper hyper_;
  nn::ParamStore store_;
  nn::Gru gru_;
  nn::Linear head_;
  double target_scale_ = 1.0;
};

GruElModel TrainGruElModel(std::span<const pvrnn::Sequence> sequences,
                           std::span<const double> rewards, int obs_width,
                           int num_actions, const GruElHyper& hyper,
                           std::uint64_t seed);

void SaveGruElModel(const std::string& path, const GruElModel& model);
GruElModel LoadGruElModel(const std::string& path);

}  // namespace ela::el

#endif  // ELA_EL_EL_H_
