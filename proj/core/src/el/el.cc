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

#include "ela/el/el.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "ela/common/error.h"
#include "ela/nn/adam.h"
#include "ela/nn/checkpoint.h"

namespace ela::el {
namespace {

using nn::Tape;
using nn::Var;

Var SquaredErrorSum(Var pred, const Matrix& target) {
  Tape& tape = *pred.tape;
  const Var diff = nn::Sub(pred, tape.Constant(target));
  return nn::Sum(nn::Mul(diff, diff));
}

double MeanOf(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

}  // namespace

double ElDelta(std::size_t index, std::span<const ElSample> samples,
               double delta) {
  Check(delta > 0.0, "EL_delta: delta must be positive");
  Check(index < samples.size(), "EL_delta: index out of range");
  const Eigen::VectorXd& center = samples[index].l;
  double numerator = 0.0;
  int losing = 0;
  for (const ElSample& s : samples) {
    Check(s.l.size() == center.size(), "EL_delta: representation widths differ");
    if ((s.l - center).norm() >= delta) continue;
    numerator += std::max(-s.reward, 0.0);
    if (s.reward <= 0.0) ++losing;
  }
  if (losing == 0) Fail("EL_delta undefined: no losing neighbors within delta");
  return numerator / losing;
}

std::vector<double> ElDeltaAll(std::span<const ElSample> samples, double delta,
                               bool strict) {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    try {
      out[i] = ElDelta(i, samples, delta);
    } catch (const Error&) {
      if (strict) throw;
      out[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

double DefaultDelta(std::span<const ElSample> samples) {
  Check(samples.size() >= 2, "default delta needs at least two samples");
  std::vector<double> d;
  d.reserve(samples.size() * (samples.size() - 1) / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      d.push_back((samples[i].l - samples[j].l).norm());
    }
  }
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (d.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(d.begin(), mid));
  }
  Check(median > 0.0, "default delta: all representations coincide");
  return 0.2 * median;
}

nlohmann::json ElHyper::ToJson() const {
  return {{"hidden", hidden}, {"lr", lr}, {"epochs", epochs},
          {"batch_size", batch_size}};
}

ElHyper ElHyper::FromJson(const nlohmann::json& j) {
  ElHyper h;
  h.hidden = j.at("hidden");
  h.lr = j.at("lr");
  h.epochs = j.at("epochs");
  h.batch_size = j.at("batch_size");
  return h;
}

ElModel::ElModel(int l_dim, const ElHyper& hyper, std::uint64_t seed)
    : l_dim_(l_dim), hyper_(hyper) {
  Check(l_dim > 0 && hyper.hidden > 0, "EL model: widths must be positive");
  Check(hyper.epochs >= 0 && hyper.batch_size > 0 && hyper.lr > 0.0,
        "EL model: invalid training hyperparameters");
  Rng rng(seed);
  mlp_ = nn::Mlp(store_, "el", {l_dim, hyper.hidden, 1}, nn::Activation::kTanh,
                 nn::Activation::kIdentity, rng);
}

std::vector<double> ElModel::EstimateRows(const Matrix& l_rows) const {
  Check(l_rows.cols() == l_dim_,
        fmt::format("EL model expects width {}, got {}", l_dim_, l_rows.cols()));
  Tape tape;
  tape.set_params_frozen(true);
  const Var out = ForwardUnit(tape, tape.Constant(l_rows));
  std::vector<double> est(static_cast<std::size_t>(l_rows.rows()));
  for (Eigen::Index i = 0; i < l_rows.rows(); ++i) {
    est[i] = target_scale_ * out.value()(i, 0);
  }
  return est;
}

Var ElModel::ForwardUnit(Tape& tape, Var l_rows) const {
  return nn::Softplus(mlp_.Forward(tape, l_rows));
}

double ElModel::Estimate(const Eigen::VectorXd& l) const {
  return EstimateRows(Matrix(l.transpose())).front();
}

ElModel TrainElModel(std::span<const ElSample> samples, const ElHyper& hyper,
                     std::uint64_t seed) {
  Check(!samples.empty(), "EL model: no samples");
  const int l_dim = static_cast<int>(samples.front().l.size());
  std::vector<int> losing;
  std::vector<double> targets;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Check(samples[i].l.size() == l_dim, "EL model: representation widths differ");
    if (samples[i].reward <= 0.0) {
      losing.push_back(static_cast<int>(i));
      targets.push_back(-samples[i].reward);
    }
  }
  if (losing.empty()) Fail("EL model: no trajectory with reward <= 0");
  ElModel model(l_dim, hyper, DeriveSeed(seed, "el-init"));
  const double mean_target = MeanOf(targets);
  const double scale = mean_target > 0.0 ? mean_target : 1.0;
  model.set_target_scale(scale);

  nn::AdamConfig cfg;
  cfg.lr = hyper.lr;
  Rng order_rng(DeriveSeed(seed, "el-shuffle"));
  const int n = static_cast<int>(losing.size());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const std::vector<int> order = order_rng.Permutation(n);
    for (int start = 0; start < n; start += hyper.batch_size) {
      const int end = std::min(n, start + hyper.batch_size);
      Matrix x(end - start, l_dim);
      Matrix y(end - start, 1);
      for (int k = start; k < end; ++k) {
        x.row(k - start) = samples[losing[order[k]]].l.transpose();
        y(k - start, 0) = targets[order[k]] / scale;
      }
      model.store().ZeroGrad();
      Tape tape;
      const Var pred = model.ForwardUnit(tape, tape.Constant(x));
      tape.Backward(nn::Scale(SquaredErrorSum(pred, y),
                              1.0 / static_cast<double>(end - start)));
      nn::AdamStep(model.store(), cfg);
    }
  }
  Matrix all(static_cast<Eigen::Index>(samples.size()), l_dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    all.row(static_cast<Eigen::Index>(i)) = samples[i].l.transpose();
  }
  const std::vector<double> est = model.EstimateRows(all);
  model.set_fitted_range(*std::min_element(est.begin(), est.end()),
                         *std::max_element(est.begin(), est.end()));
  return model;
}

void SaveElModel(const std::string& path, const ElModel& model) {
  const nlohmann::json meta = {{"kind", "el-mlp"},
                               {"l_dim", model.l_dim()},
                               {"hyper", model.hyper().ToJson()},
                               {"target_scale", model.target_scale()},
                               {"fitted_min", model.fitted_min()},
                               {"fitted_max", model.fitted_max()}};
  nn::SaveCheckpoint(path, model.store(), meta);
}

ElModel LoadElModel(const std::string& path) {
  const nlohmann::json ckpt = nn::ReadCheckpointJson(path);
  const nlohmann::json& meta = ckpt.at("meta");
  if (meta.value("kind", "") != "el-mlp") {
    Fail(fmt::format("'{}' is not an EL model checkpoint", path));
  }
  ElModel model(meta.at("l_dim").get<int>(), ElHyper::FromJson(meta.at("hyper")), 0);
  nn::LoadParamsFromJson(ckpt, model.store());
  model.set_target_scale(meta.at("target_scale").get<double>());
  model.set_fitted_range(meta.at("fitted_min").get<double>(),
                         meta.at("fitted_max").get<double>());
  return model;
}

std::vector<double> NormalizeEl(std::span<const double> estimates) {
  std::vector<double> out(estimates.size(), 0.0);
  if (estimates.empty()) return out;
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    out[i] = (estimates[i] - *lo) / range;
  }
  return out;
}

GruElModel::GruElModel(int obs_width, int num_actions, const GruElHyper& hyper,
                       std::uint64_t seed)
    : obs_width_(obs_width), num_actions_(num_actions), hyper_(hyper) {
  Check(hyper.hidden > 0 && hyper.batch_size > 0 && hyper.epochs >= 0 &&
            hyper.lr > 0.0,
        "GRU EL model: invalid hyperparameters");
  Rng rng(seed);
  gru_ = nn::Gru(store_, "el_gru", obs_width + num_actions, hyper.hidden, rng);
  head_ = nn::Linear(store_, "el_head", hyper.hidden, 1, rng);
}

nn::Var GruElModel::Forward(Tape& tape,
                            std::span<const pvrnn::Sequence* const> batch) const {
  const auto B = static_cast<Eigen::Index>(batch.size());
  Check(B > 0, "GRU EL model: empty batch");
  int T = 0;
  for (const auto* s : batch) {
    Check(s->obs.cols() == obs_width_, "GRU EL model: observation width mismatch");
    T = std::max(T, s->length());
  }
  Var h = tape.Constant(Matrix::Zero(B, hyper_.hidden));
  for (int t = 0; t < T; ++t) {
    Matrix x = Matrix::Zero(B, obs_width_ + num_actions_);
    Matrix mask = Matrix::Zero(B, 1);
    bool all_active = true;
    for (Eigen::Index i = 0; i < B; ++i) {
      const auto& s = *batch[i];
      if (t >= s.length()) {
        all_active = false;
        continue;
      }
      x.row(i).head(obs_width_) = s.obs.row(t);
      x(i, obs_width_ + s.actions[t]) = 1.0;
      mask(i, 0) = 1.0;
    }
    const Var next = gru_.Step(tape, h, tape.Constant(std::move(x)));
    // Finished rows keep their last hidden state.
    h = all_active ? next : nn::Add(h, nn::ScaleRows(nn::Sub(next, h), mask));
  }
  return nn::Softplus(head_.Forward(tape, h));
}

std::vector<double> GruElModel::EstimateBatch(
    std::span<const pvrnn::Sequence* const> batch) const {
  Tape tape;
  tape.set_params_frozen(true);
  const Var out = Forward(tape, batch);
  std::vector<double> est(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    est[i] = target_scale_ * out.value()(static_cast<Eigen::Index>(i), 0);
  }
  return est;
}

GruElModel TrainGruElModel(std::span<const pvrnn::Sequence> sequences,
                           std::span<const double> rewards, int obs_width,
                           int num_actions, const GruElHyper& hyper,
                           std::uint64_t seed) {
  Check(sequences.size() == rewards.size(),
        "GRU EL model: sequences and rewards differ in count");
  std::vector<int> losing;
  std::vector<double> targets;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    if (rewards[i] <= 0.0) {
      losing.push_back(static_cast<int>(i));
      targets.push_back(-rewards[i]);
    }
  }
  if (losing.empty()) Fail("GRU EL model: no trajectory with reward <= 0");
  GruElModel model(obs_width, num_actions, hyper, DeriveSeed(seed, "gru-el-init"));
  const double mean_target = MeanOf(targets);
  const double scale = mean_target > 0.0 ? mean_target : 1.0;
  model.set_target_scale(scale);
  nn::AdamConfig cfg;
  cfg.lr = hyper.lr;
  Rng order_rng(DeriveSeed(seed, "gru-el-shuffle"));
  const int n = static_cast<int>(losing.size());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const std::vector<int> order = order_rng.Permutation(n);
    for (int start = 0; start < n; start += hyper.batch_size) {
      const int end = std::min(n, start + hyper.batch_size);
      std::vector<const pvrnn::Sequence*> batch;
      Matrix y(end - start, 1);
      for (int k = start; k < end; ++k) {
        batch.push_back(&sequences[losing[order[k]]]);
        y(k - start, 0) = targets[order[k]] / scale;
      }
      model.store().ZeroGrad();
      Tape tape;
      const Var pred = model.Forward(tape, batch);
      tape.Backward(nn::Scale(SquaredErrorSum(pred, y),
                              1.0 / static_cast<double>(end - start)));
      nn::AdamStep(model.store(), cfg);
    }
  }
  return model;
}

nlohmann::json GruElHyper::ToJson() const {
  return {{"hidden", hidden}, {"lr", lr}, {"epochs", epochs}, {"batch_size", batch_size}};
}

GruElHyper GruElHyper::FromJson(const nlohmann::json& j) {
  GruElHyper h;
  h.hidden = j.at("hidden").get<int>();
  h.lr = j.at("lr").get<double>();
  h.epochs = j.at("epochs").get<int>();
  h.batch_size = j.at("batch_size").get<int>();
  return h;
}

void SaveGruElModel(const std::string& path, const GruElModel& model) {
  const nlohmann::json meta = {{"kind", "el-gru"},
                               {"obs_width", model.obs_width()},
                               {"num_actions", model.num_actions()},
                               {"hyper", model.hyper().ToJson()},
                               {"target_scale", model.target_scale()}};
  nn::SaveCheckpoint(path, model.store(), meta);
}

GruElModel LoadGruElModel(const std::string& path) {
  const nlohmann::json ckpt = nn::ReadCheckpointJson(path);
  const nlohmann::json& meta = ckpt.at("meta");
  if (meta.value("kind", "") != "el-gru") {
    Fail(fmt::format("'{}' is not a GRU EL model checkpoint", path));
  }
  GruElModel model(meta.at("obs_width").get<int>(), meta.at("num_actions").get<int>(),
                   GruElHyper::FromJson(meta.at("hyper")), 0);
  nn::LoadParamsFromJson(ckpt, model.store());
  model.set_target_scale(meta.at("target_scale").get<double>());
  return model;
}

}  // namespace ela::el
