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

#include "ela/pvrnn/pvrnn.h"

#include <algorithm>
#include <array>
#include <map>

#include <fmt/format.h>

#include "ela/common/csv.h"
#include "ela/common/error.h"
#include "ela/nn/checkpoint.h"

namespace ela::pvrnn {
namespace {

using nn::Activation;
using nn::Tape;

// Sequences are inferred in chunks of this many rows.
constexpr int kInferChunk = 256;

Var Concat(std::initializer_list<Var> parts) {
  return nn::ConcatCols(std::span<const Var>(parts.begin(), parts.size()));
}

}  // namespace

void PvrnnHyper::Validate() const {
  if (z_dim <= 0 || h_dim <= 0 || r_dim <= 0 || l_dim <= 0) {
    Fail("P-VRNN widths must be positive");
  }
  if (epochs < 0 || batch_size <= 0 || infer_steps < 0) {
    Fail("P-VRNN epochs/infer_steps must be >= 0 and batch_size > 0");
  }
  if (!(lr > 0.0) || !(infer_lr > 0.0) || !(l_init_std >= 0.0)) {
    Fail("P-VRNN learning rates must be positive");
  }
}

nlohmann::json PvrnnHyper::ToJson() const {
  return {{"z_dim", z_dim},         {"h_dim", h_dim},
          {"r_dim", r_dim},         {"l_dim", l_dim},
          {"epochs", epochs},       {"batch_size", batch_size},
          {"lr", lr},               {"repr_lr", repr_lr},
          {"l_init_std", l_init_std}, {"infer_steps", infer_steps},
          {"infer_lr", infer_lr}};
}

PvrnnHyper PvrnnHyper::FromJson(const nlohmann::json& j) {
  PvrnnHyper h;
  h.z_dim = j.at("z_dim");
  h.h_dim = j.at("h_dim");
  h.r_dim = j.at("r_dim");
  h.l_dim = j.at("l_dim");
  h.epochs = j.at("epochs");
  h.batch_size = j.at("batch_size");
  h.lr = j.at("lr");
  h.repr_lr = j.at("repr_lr");
  h.l_init_std = j.at("l_init_std");
  h.infer_steps = j.at("infer_steps");
  h.infer_lr = j.at("infer_lr");
  h.Validate();
  return h;
}

Sequence ToSequence(const games::Trajectory& trajectory) {
  Check(!trajectory.steps.empty(), "trajectory has no steps");
  const auto width = static_cast<Eigen::Index>(trajectory.steps[0].obs.size());
  Sequence s;
  s.obs.resize(static_cast<Eigen::Index>(trajectory.steps.size()), width);
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& step = trajectory.steps[t];
    Check(static_cast<Eigen::Index>(step.obs.size()) == width,
          "observation width changes within a trajectory");
    for (Eigen::Index k = 0; k < width; ++k) {
      s.obs(static_cast<Eigen::Index>(t), k) = step.obs[k];
    }
    s.actions.push_back(step.action);
  }
  return s;
}

std::vector<Sequence> ToSequences(const games::Dataset& dataset) {
  std::vector<Sequence> out;
  out.reserve(dataset.trajectories.size());
  for (const auto& t : dataset.trajectories) out.push_back(ToSequence(t));
  return out;
}

PvrnnModel::PvrnnModel(int obs_width, int num_actions, const PvrnnHyper& hyper,
                       std::uint64_t seed)
    : obs_width_(obs_width), num_actions_(num_actions), hyper_(hyper) {
  hyper_.Validate();
  Check(obs_width > 0 && num_actions > 1, "P-VRNN: invalid env widths");
  Rng rng(seed);
  const int h = hyper_.h_dim, z = hyper_.z_dim, r = hyper_.r_dim,
            l = hyper_.l_dim;
  const auto T = Activation::kTanh;
  const auto I = Activation::kIdentity;
  psi_o_ = nn::Mlp(store_, "psi_o", {obs_width, h, h}, T, I, rng);
  psi_a_ = nn::Mlp(store_, "psi_a", {num_actions, h, h}, T, I, rng);
  prior_ = nn::Mlp(store_, "prior", {r + h + l, h, 2 * z}, T, I, rng);
  encoder_ = nn::Mlp(store_, "encoder", {r + h + l + h, h, 2 * z}, T, I, rng);
  decoder_ = nn::Mlp(store_, "decoder", {r + z + h + l, h, num_actions}, T, I, rng);
  gru_ = nn::Gru(store_, "recurrence", h + z + h + l, r, rng);
}

Var PvrnnModel::FeaturizeObs(Tape& tape, Var obs) const {
  return psi_o_.Forward(tape, obs);
}

Var PvrnnModel::FeaturizeAction(Tape& tape, Var action_onehot) const {
  return psi_a_.Forward(tape, action_onehot);
}

GaussianVars PvrnnModel::PriorStep(Tape& tape, Var h_prev, Var o_f, Var l) const {
  const Var out = prior_.Forward(tape, Concat({h_prev, o_f, l}));
  const int z = hyper_.z_dim;
  return {nn::SliceCols(out, 0, z), nn::SliceCols(out, z, z)};
}

GaussianVars PvrnnModel::EncoderStep(Tape& tape, Var h_prev, Var o_f, Var l,
                                     Var a_f) const {
  const Var out = encoder_.Forward(tape, Concat({h_prev, o_f, l, a_f}));
  const int z = hyper_.z_dim;
  return {nn::SliceCols(out, 0, z), nn::SliceCols(out, z, z)};
}

Var PvrnnModel::DecoderStep(Tape& tape, Var h_prev, Var z, Var o_f, Var l) const {
  return decoder_.Forward(tape, Concat({h_prev, z, o_f, l}));
}

Var PvrnnModel::RecurrenceStep(Tape& tape, Var h_prev, Var a_f, Var z, Var o_f,
                               Var l) const {
  return gru_.Step(tape, h_prev, Concat({a_f, z, o_f, l}));
}

LossVars PvrnnModel::BatchLoss(Tape& tape, std::span<const Sequence* const> batch,
                               Var l, std::span<Rng> rngs) const {
  const auto B = static_cast<Eigen::Index>(batch.size());
  Check(B > 0, "BatchLoss: empty batch");
  Check(l.rows() == B && l.cols() == hyper_.l_dim,
        fmt::format("BatchLoss: representation shape {} for batch of {}",
                    nn::ShapeString(l.value()), B));
  Check(rngs.size() == 1 || static_cast<Eigen::Index>(rngs.size()) == B,
        "BatchLoss: need one RNG stream or one per row");
  int T = 0;
  for (const Sequence* s : batch) {
    Check(s->length() > 0, "BatchLoss: empty sequence");
    Check(s->obs.rows() == s->length() && s->obs.cols() == obs_width_,
          fmt::format("BatchLoss: observation matrix {} does not match "
                      "{} steps of width {}",
                      nn::ShapeString(s->obs), s->length(), obs_width_));
    T = std::max(T, s->length());
  }
  const int z_dim = hyper_.z_dim;
  Var h = tape.Constant(Matrix::Zero(B, hyper_.r_dim));
  Var recon_rows = tape.Constant(Matrix::Zero(B, 1));
  Var kl_rows = tape.Constant(Matrix::Zero(B, 1));
  for (int t = 0; t < T; ++t) {
    Matrix obs = Matrix::Zero(B, obs_width_);
    Matrix onehot = Matrix::Zero(B, num_actions_);
    Matrix mask = Matrix::Zero(B, 1);
    Matrix noise = Matrix::Zero(B, z_dim);
    bool all_active = true;
    for (Eigen::Index i = 0; i < B; ++i) {
      const Sequence& s = *batch[i];
      if (t >= s.length()) {
        all_active = false;
        continue;
      }
      const int a = s.actions[t];
      if (a < 0 || a >= num_actions_) {
        Fail(fmt::format("BatchLoss: action {} out of range", a));
      }
      obs.row(i) = s.obs.row(t);
      onehot(i, a) = 1.0;
      mask(i, 0) = 1.0;
      Rng& rng = rngs.size() == 1 ? rngs[0] : rngs[i];
      for (int k = 0; k < z_dim; ++k) noise(i, k) = rng.Normal();
    }
    const Var o_f = FeaturizeObs(tape, tape.Constant(std::move(obs)));
    const Var a_f = FeaturizeAction(tape, tape.Constant(onehot));
    const GaussianVars prior = PriorStep(tape, h, o_f, l);
    const GaussianVars post = EncoderStep(tape, h, o_f, l, a_f);
    const Var z = nn::Reparameterize(post.mean, post.log_std, noise);
    const Var logits = DecoderStep(tape, h, z, o_f, l);
    Var ce = nn::SoftmaxCrossEntropy(logits, onehot);
    Var kl = nn::KlDiagGaussian(post.mean, post.log_std, prior.mean, prior.log_std);
    if (!all_active) kl = nn::ScaleRows(kl, mask);
    recon_rows = nn::Add(recon_rows, ce);
    kl_rows = nn::Add(kl_rows, kl);
    if (t + 1 < T) h = RecurrenceStep(tape, h, a_f, z, o_f, l);
  }
  LossVars out;
  out.recon = nn::Sum(recon_rows);
  out.kl = nn::Sum(kl_rows);
  out.total = nn::Add(out.recon, out.kl);
  out.total_rows = nn::Add(recon_rows, kl_rows);
  return out;
}

LossValues TrajectoryLoss(const PvrnnModel& model, const Sequence& sequence,
                          const Eigen::VectorXd& l, Rng& rng) {
  Check(l.size() == model.hyper().l_dim,
        fmt::format("TrajectoryLoss: representation has {} entries, expected {}",
                    l.size(), model.hyper().l_dim));
  Tape tape;
  tape.set_params_frozen(true);
  const Sequence* batch[] = {&sequence};
  const Var lv = tape.Constant(Matrix(l.transpose()));
  const LossVars loss = model.BatchLoss(tape, batch, lv, std::span<Rng>(&rng, 1));
  return {loss.total.value()(0, 0), loss.recon.value()(0, 0),
          loss.kl.value()(0, 0)};
}

TrainResult Train(std::span<const Sequence> sequences, int obs_width,
                  int num_actions, const PvrnnHyper& hyper, std::uint64_t seed) {
  hyper.Validate();
  if (sequences.empty()) Fail("P-VRNN training needs a nonempty dataset");
  const auto N = static_cast<Eigen::Index>(sequences.size());
  TrainResult result{PvrnnModel(obs_width, num_actions, hyper,
                                DeriveSeed(seed, "model")),
                     {}, {}};
  RepresentationTable& table = result.table;
  table.values.resize(N, hyper.l_dim);
  Rng init_rng(DeriveSeed(seed, "repr-init"));
  for (Eigen::Index i = 0; i < table.values.size(); ++i) {
    table.values.data()[i] = hyper.l_init_std * init_rng.Normal();
  }
  table.m = Matrix::Zero(N, hyper.l_dim);
  table.v = Matrix::Zero(N, hyper.l_dim);
  table.steps.assign(static_cast<std::size_t>(N), 0);

  PvrnnModel& model = result.model;
  nn::AdamConfig net_cfg;
  net_cfg.lr = hyper.lr;
  nn::AdamConfig repr_cfg;
  repr_cfg.lr = hyper.EffectiveReprLr();
  Rng order_rng(DeriveSeed(seed, "shuffle"));
  Rng noise_rng(DeriveSeed(seed, "noise"));

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const std::vector<int> order = order_rng.Permutation(static_cast<int>(N));
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(hyper.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(hyper.batch_size));
      const auto B = static_cast<Eigen::Index>(end - start);
      std::vector<const Sequence*> batch;
      Matrix l_rows(B, hyper.l_dim);
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(&sequences[order[k]]);
        l_rows.row(static_cast<Eigen::Index>(k - start)) = table.values.row(order[k]);
      }
      model.store().ZeroGrad();
      Tape tape;
      const Var l = tape.Variable(std::move(l_rows));
      const LossVars loss =
          model.BatchLoss(tape, batch, l, std::span<Rng>(&noise_rng, 1));
      epoch_total += loss.total.value()(0, 0);
      tape.Backward(nn::Scale(loss.total, 1.0 / static_cast<double>(B)));
      nn::AdamStep(model.store(), net_cfg);
      const Matrix l_grad = tape.Grad(l);
      for (std::size_t k = start; k < end; ++k) {
        const int row = order[k];
        const auto j = static_cast<Eigen::Index>(k - start);
        table.steps[row] += 1;
        nn::AdamApply(repr_cfg, table.steps[row], table.values.row(row),
                      l_grad.row(j), table.m.row(row), table.v.row(row));
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(N));
  }
  return result;
}

Matrix InferRepresentations(const PvrnnModel& model,
                            std::span<const Sequence> sequences,
                            std::uint64_t seed) {
  const PvrnnHyper& hyper = model.hyper();
  const auto N = static_cast<Eigen::Index>(sequences.size());
  Matrix values = Matrix::Zero(N, hyper.l_dim);
  nn::AdamConfig cfg;
  cfg.lr = hyper.infer_lr;
  // Group equal lengths together so padding stays rare.
  std::vector<int> order(static_cast<std::size_t>(N));
  for (int i = 0; i < static_cast<int>(N); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return sequences[a].length() < sequences[b].length();
  });
  for (std::size_t start = 0; start < order.size(); start += kInferChunk) {
    const std::size_t end = std::min(order.size(), start + kInferChunk);
    const auto B = static_cast<Eigen::Index>(end - start);
    std::vector<const Sequence*> batch;
    std::vector<Rng> rngs;
    for (std::size_t k = start; k < end; ++k) {
      batch.push_back(&sequences[order[k]]);
      rngs.emplace_back(DeriveSeed(seed, static_cast<std::uint64_t>(order[k])));
    }
    Matrix l_rows = Matrix::Zero(B, hyper.l_dim);
    Matrix m = Matrix::Zero(B, hyper.l_dim);
    Matrix v = Matrix::Zero(B, hyper.l_dim);
    for (int step = 1; step <= hyper.infer_steps; ++step) {
      Tape tape;
      tape.set_params_frozen(true);
      const Var l = tape.Variable(l_rows);
      const LossVars loss = model.BatchLoss(tape, batch, l, rngs);
      tape.Backward(loss.total);
      // Row i of the summed loss depends only on row i of l, so one batched
      // update equals B independent single-sequence updates.
      nn::AdamApply(cfg, step, l_rows, tape.Grad(l), m, v);
    }
    for (std::size_t k = start; k < end; ++k) {
      values.row(order[k]) = l_rows.row(static_cast<Eigen::Index>(k - start));
    }
  }
  return values;
}

Eigen::VectorXd InferRepresentation(const PvrnnModel& model,
                                    const Sequence& sequence,
                                    std::uint64_t seed) {
  const Matrix l = InferRepresentations(model, std::span(&sequence, 1), seed);
  return l.row(0).transpose();
}

void SaveModel(const std::string& path, const PvrnnModel& model) {
  nlohmann::json meta = {{"kind", "pvrnn"},
                         {"obs_width", model.obs_width()},
                         {"num_actions", model.num_actions()},
                         {"hyper", model.hyper().ToJson()}};
  nn::SaveCheckpoint(path, model.store(), meta);
}

PvrnnModel LoadModel(const std::string& path) {
  const nlohmann::json ckpt = nn::ReadCheckpointJson(path);
  const nlohmann::json& meta = ckpt.at("meta");
  if (meta.value("kind", "") != "pvrnn") {
    Fail(fmt::format("'{}' is not a P-VRNN checkpoint", path));
  }
  PvrnnModel model(meta.at("obs_width").get<int>(),
                   meta.at("num_actions").get<int>(),
                   PvrnnHyper::FromJson(meta.at("hyper")), 0);
  nn::LoadParamsFromJson(ckpt, model.store());
  return model;
}

void WriteRepresentationCsv(const std::string& path,
                            std::span<const RepresentationRow> rows,
                            const std::string& comment) {
  CsvTable table;
  table.comment = comment;
  table.header = {"game_id", "player_index", "demonstrator_tag"};
  const Eigen::Index dim = rows.empty() ? 0 : rows.front().l.size();
  for (Eigen::Index k = 0; k < dim; ++k) table.header.push_back(fmt::format("l_{}", k));
  for (const auto& r : rows) {
    Check(r.l.size() == dim, "representation rows differ in width");
    std::vector<std::string> fields = {std::to_string(r.key.game_id),
                                       std::to_string(r.key.player_index), r.tag};
    for (Eigen::Index k = 0; k < dim; ++k) fields.push_back(FormatDouble(r.l(k)));
    table.rows.push_back(std::move(fields));
  }
  WriteCsv(path, table);
}

std::vector<RepresentationRow> ReadRepresentationCsv(const std::string& path) {
  const CsvTable table = ReadCsv(path);
  const int gid = table.Column("game_id");
  const int pid = table.Column("player_index");
  const int tag = table.Column("demonstrator_tag");
  std::vector<int> l_cols;
  for (int k = 0;; ++k) {
    const auto name = fmt::format("l_{}", k);
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end()) break;
    l_cols.push_back(table.Column(name));
  }
  if (l_cols.empty()) Fail(fmt::format("'{}' has no l_0.. columns", path));
  std::vector<RepresentationRow> rows;
  std::map<games::TrajectoryKey, int> seen;
  for (const auto& f : table.rows) {
    RepresentationRow r;
    r.key = {ParseInt(f[gid]), static_cast<int>(ParseInt(f[pid]))};
    r.tag = f[tag];
    r.l.resize(static_cast<Eigen::Index>(l_cols.size()));
    for (std::size_t k = 0; k < l_cols.size(); ++k) {
      r.l(static_cast<Eigen::Index>(k)) = ParseDouble(f[l_cols[k]]);
    }
    if (!seen.emplace(r.key, 0).second) {
      Fail(fmt::format("'{}': duplicate key ({}, {})", path, r.key.game_id,
                       r.key.player_index));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace ela::pvrnn
