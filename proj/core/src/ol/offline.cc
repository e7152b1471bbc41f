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

#include "ela/ol/offline.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"
#include "ela/games/kuhn.h"
#include "ela/games/matrix_game.h"
#include "ela/games/rps.h"
#include "ela/nn/adam.h"
#include "ela/nn/checkpoint.h"
#include "ela/nn/tape.h"

namespace ela::ol {
namespace {

using games::EnvKind;
using nn::Tape;
using nn::Var;

Score Summarize(const std::vector<double>& xs) {
  Score s;
  s.games = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                            static_cast<double>(xs.size()));
  }
  return s;
}

// Per-game rewards of `a` against `b` (seats alternating, a first).
std::vector<double> PlayGames(const Agent& a, const Agent& b,
                              const games::EnvConfig& env,
                              std::int64_t num_games, std::uint64_t seed) {
  Check(num_games >= 1, "evaluation needs at least one game");
  for (int r = 0; r < 2; ++r) {
    Check(a.by_role[r] != nullptr && b.by_role[r] != nullptr,
          "evaluation agent is missing a seat strategy");
  }
  std::vector<double> rewards;
  rewards.reserve(static_cast<std::size_t>(num_games));
  for (std::int64_t g = 0; g < num_games; ++g) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(g)));
    const int a_seat = static_cast<int>(g % 2);
    const games::Strategy& seat0 = a_seat == 0 ? *a.by_role[0] : *b.by_role[0];
    const games::Strategy& seat1 = a_seat == 0 ? *b.by_role[1] : *a.by_role[1];
    const auto [t0, t1] = games::PlayEpisode(env, seat0, seat1, rng);
    rewards.push_back(a_seat == 0 ? t0.reward : t1.reward);
  }
  return rewards;
}

}  // namespace

std::string FilterModeName(FilterMode mode) {
  switch (mode) {
    case FilterMode::kEla: return "ela";
    case FilterMode::kWt: return "wt";
    case FilterMode::kNone: return "none";
  }
  Fail("unknown filter mode");
}

FilterMode ParseFilterMode(std::string_view name) {
  if (name == "ela") return FilterMode::kEla;
  if (name == "wt") return FilterMode::kWt;
  if (name == "none") return FilterMode::kNone;
  Fail(fmt::format("unknown filter mode '{}' (expected ela, wt or none)", name));
}

games::Dataset FilterDataset(const games::Dataset& dataset,
                             const ElAssignment* scaled_el,
                             const FilterConfig& config) {
  if (config.mode == FilterMode::kEla) {
    Check(scaled_el != nullptr, "ELA filtering needs EL estimates");
    if (!(config.el_threshold >= 0.0 && config.el_threshold <= 1.0)) {
      Fail(fmt::format("EL threshold {} outside [0, 1]", config.el_threshold));
    }
  }
  games::Dataset out;
  out.meta = dataset.meta;
  for (const auto& t : dataset.trajectories) {
    bool keep = true;
    switch (config.mode) {
      case FilterMode::kNone:
        break;
      case FilterMode::kWt:
        keep = t.reward > 0.0;
        break;
      case FilterMode::kEla: {
        const auto it = scaled_el->find(games::KeyOf(t));
        if (it == scaled_el->end()) {
          Fail(fmt::format("no EL estimate for trajectory ({}, {})", t.game_id,
                           t.player_index));
        }
        keep = it->second <= config.el_threshold;
        break;
      }
    }
    if (keep) out.trajectories.push_back(t);
  }
  if (out.trajectories.empty()) Fail("filter removed all trajectories");
  return out;
}

nlohmann::json PolicyHyper::ToJson() const {
  return {{"hidden", hidden}, {"lr", lr}, {"epochs", epochs},
          {"minibatches", minibatches}};
}

PolicyHyper PolicyHyper::FromJson(const nlohmann::json& j) {
  PolicyHyper h;
  h.hidden = j.at("hidden");
  h.lr = j.at("lr");
  h.epochs = j.at("epochs");
  h.minibatches = j.at("minibatches");
  return h;
}

Policy::Policy(int obs_width, int num_actions, const PolicyHyper& hyper,
               std::uint64_t seed)
    : obs_width_(obs_width), num_actions_(num_actions), hyper_(hyper) {
  Check(obs_width > 0 && num_actions > 1 && hyper.hidden > 0,
        "policy: invalid widths");
  Check(hyper.epochs >= 0 && hyper.minibatches > 0 && hyper.lr > 0.0,
        "policy: invalid training hyperparameters");
  Rng rng(seed);
  mlp_ = nn::Mlp(store_, "policy", {obs_width, hyper.hidden, hyper.hidden, num_actions},
                 nn::Activation::kRelu, nn::Activation::kIdentity, rng);
}

Var Policy::ForwardLogits(Tape& tape, Var obs_rows) const {
  return mlp_.Forward(tape, obs_rows);
}

Matrix Policy::Logits(const Matrix& obs_rows) const {
  Tape tape;
  tape.set_params_frozen(true);
  return ForwardLogits(tape, tape.Constant(obs_rows)).value();
}

std::vector<double> Policy::ActionProbs(const games::Observation& obs) const {
  if (auto it = cache_.find(obs.key); it != cache_.end()) return it->second;
  if (static_cast<int>(obs.values.size()) != obs_width_) {
    Fail(fmt::format("policy expects observation width {}, got {}", obs_width_,
                     obs.values.size()));
  }
  Matrix x(1, obs_width_);
  for (int k = 0; k < obs_width_; ++k) x(0, k) = obs.values[k];
  const Matrix z = Logits(x);
  const double m = z.maxCoeff();
  std::vector<double> p(static_cast<std::size_t>(num_actions_));
  double total = 0.0;
  for (int a = 0; a < num_actions_; ++a) {
    p[a] = std::exp(z(0, a) - m);
    total += p[a];
  }
  for (double& v : p) v /= total;
  cache_.emplace(obs.key, p);
  return p;
}

BcResult TrainBc(const games::Dataset& dataset, const PolicyHyper& hyper,
                 std::uint64_t seed) {
  Check(!dataset.trajectories.empty(), "behavior cloning needs a nonempty dataset");
  const EnvKind env = games::ParseEnvKind(dataset.meta.env);
  const int width = games::ObservationWidth(env);
  const int num_actions = games::NumActions(env);

  // Steps are reduced to (observation id, action); distinct observations are
  // numbered in order of first appearance.
  std::map<std::vector<double>, int> obs_ids;
  std::vector<std::vector<double>> unique_obs;
  std::vector<int> step_obs;
  std::vector<int> step_action;
  for (const auto& t : dataset.trajectories) {
    for (const auto& s : t.steps) {
      Check(static_cast<int>(s.obs.size()) == width, "observation width mismatch");
      Check(s.action >= 0 && s.action < num_actions, "action out of range");
      auto [it, inserted] = obs_ids.emplace(s.obs, static_cast<int>(unique_obs.size()));
      if (inserted) unique_obs.push_back(s.obs);
      step_obs.push_back(it->second);
      step_action.push_back(s.action);
    }
  }
  const int n_steps = static_cast<int>(step_obs.size());
  const int n_obs = static_cast<int>(unique_obs.size());

  BcResult result{Policy(width, num_actions, hyper, DeriveSeed(seed, "policy-init")), {}};
  Policy& policy = result.policy;
  nn::AdamConfig cfg;
  cfg.lr = hyper.lr;
  Rng order_rng(DeriveSeed(seed, "bc-shuffle"));
  Matrix counts(n_obs, num_actions);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    const std::vector<int> order = order_rng.Permutation(n_steps);
    double ll_sum = 0.0;
    int batches = 0;
    for (int b = 0; b < hyper.minibatches; ++b) {
      const int begin = static_cast<int>(static_cast<std::int64_t>(n_steps) * b / hyper.minibatches);
      const int end = static_cast<int>(static_cast<std::int64_t>(n_steps) * (b + 1) / hyper.minibatches);
      if (begin == end) continue;
      // Steps sharing an observation share logits, so a minibatch reduces
      // exactly to per-observation action counts.
      counts.setZero();
      for (int k = begin; k < end; ++k) counts(step_obs[order[k]], step_action[order[k]]) += 1.0;
      std::vector<int> present;
      for (int o = 0; o < n_obs; ++o) {
        if (counts.row(o).sum() > 0.0) present.push_back(o);
      }
      const auto rows = static_cast<Eigen::Index>(present.size());
      Matrix x(rows, width);
      Matrix targets(rows, num_actions);
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (int k = 0; k < width; ++k) x(r, k) = unique_obs[present[r]][k];
        targets.row(r) = counts.row(present[r]);
      }
      policy.store().ZeroGrad();
      Tape tape;
      const Var logits = policy.ForwardLogits(tape, tape.Constant(x));
      const Var loss = nn::Scale(nn::Sum(nn::SoftmaxCrossEntropy(logits, targets)),
                                 1.0 / static_cast<double>(end - begin));
      ll_sum -= loss.value()(0, 0);
      ++batches;
      tape.Backward(loss);
      nn::AdamStep(policy.store(), cfg);
    }
    result.epoch_log_likelihood.push_back(batches > 0 ? ll_sum / batches : 0.0);
  }
  policy.ClearCache();
  return result;
}

void SavePolicy(const std::string& path, const Policy& policy,
                const nlohmann::json& extra_meta) {
  nlohmann::json meta = {{"kind", "policy"},
                         {"obs_width", policy.obs_width()},
                         {"num_actions", policy.num_actions()},
                         {"hyper", policy.hyper().ToJson()}};
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) {
    meta[it.key()] = it.value();
  }
  nn::SaveCheckpoint(path, policy.store(), meta);
}

Policy LoadPolicy(const std::string& path) {
  const nlohmann::json ckpt = nn::ReadCheckpointJson(path);
  const nlohmann::json& meta = ckpt.at("meta");
  if (meta.value("kind", "") != "policy") {
    Fail(fmt::format("'{}' is not a policy checkpoint", path));
  }
  Policy policy(meta.at("obs_width").get<int>(), meta.at("num_actions").get<int>(),
                PolicyHyper::FromJson(meta.at("hyper")), 0);
  nn::LoadParamsFromJson(ckpt, policy.store());
  return policy;
}

Agent AgentOf(const std::string& name, const games::Strategy& strategy) {
  return {name, {&strategy, &strategy}};
}

Agent AgentOf(const games::Demonstrator& demonstrator) {
  return {demonstrator.tag, {&demonstrator.by_role[0], &demonstrator.by_role[1]}};
}

Score EvaluateAvgScore(const Agent& a, const Agent& b,
                       const games::EnvConfig& env, std::int64_t num_games,
                       std::uint64_t seed) {
  std::vector<double> rewards = PlayGames(a, b, env, num_games, seed);
  if (env.kind == EnvKind::kRps) {
    for (double& r : rewards) r = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
  }
  return Summarize(rewards);
}

SupportedExploitability ComputeSupportedExploitability(
    const games::Strategy& strategy, const games::DemonstratorPool& pool,
    const games::EnvConfig& env, std::int64_t num_games, std::uint64_t seed) {
  Check(pool.size() > 0, "supported exploitability needs a nonempty pool");
  Check(pool.env() == env.kind, "pool and environment differ");
  SupportedExploitability out;
  const games::MatrixGame rps = games::RockPaperScissors();
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const games::Demonstrator& d = pool.entries()[i];
    double reward = 0.0;
    bool exact = false;
    if (env.kind == EnvKind::kRps) {
      if (auto q = games::RpsStationaryMixture(d.by_role[0]);
          q && d.by_role[0] == d.by_role[1]) {
        const games::MixedStrategy eff =
            games::RpsEffectiveMixture(strategy, *q, env.rps_rounds);
        reward = games::MatrixExpectedReward(rps, eff, *q);
        exact = true;
      }
    } else {
      reward = 0.5 * (games::KuhnExpectedValue(strategy, d.by_role[1]) -
                      games::KuhnExpectedValue(d.by_role[0], strategy));
      exact = true;
    }
    if (!exact) {
      const std::vector<double> rewards =
          PlayGames(AgentOf("policy", strategy), AgentOf(d), env, num_games,
                    DeriveSeed(seed, static_cast<std::uint64_t>(i)));
      reward = Summarize(rewards).mean;
      if (env.kind == EnvKind::kRps) reward /= env.rps_rounds;
      out.exact = false;
    }
    out.per_demonstrator.push_back(-reward);
  }
  // Adding 0.0 turns a -0.0 maximum into +0.0 for stable output.
  out.value = *std::max_element(out.per_demonstrator.begin(), out.per_demonstrator.end()) + 0.0;
  return out;
}

Matrix CrossEvaluate(const std::vector<Agent>& agents,
                     const games::EnvConfig& env, std::int64_t num_games,
                     std::uint64_t seed) {
  Check(agents.size() >= 2, "cross evaluation needs at least two agents");
  const auto n = static_cast<Eigen::Index>(agents.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = EvaluateAvgScore(agents[j], agents[i], env, num_games,
                                 DeriveSeed(seed, static_cast<std::uint64_t>(i * n + j)))
                    .mean;
    }
  }
  return m;
}

ThresholdSearch SearchThreshold(const games::Dataset& dataset,
                                const ElAssignment& scaled_el,
                                const std::vector<double>& grid,
                                const games::DemonstratorPool& pool,
                                const games::EnvConfig& env,
                                const PolicyHyper& hyper, std::uint64_t seed,
                                std::int64_t sim_games) {
  Check(!grid.empty(), "threshold grid is empty");
  ThresholdSearch search;
  double best = 0.0;
  for (double t : grid) {
    games::Dataset kept;
    try {
      kept = FilterDataset(dataset, &scaled_el, {FilterMode::kEla, t});
    } catch (const Error&) {
      continue;
    }
    const BcResult bc = TrainBc(kept, hyper, seed);
    const double se = ComputeSupportedExploitability(bc.policy, pool, env,
                                                     sim_games, seed).value;
    search.trials.push_back({t, kept.trajectories.size(), se});
    if (search.trials.size() == 1 || se < best) {
      best = se;
      search.best_threshold = t;
    }
  }
  if (search.trials.empty()) Fail("every threshold in the grid removed all trajectories");
  return search;
}

}  // namespace ela::ol
