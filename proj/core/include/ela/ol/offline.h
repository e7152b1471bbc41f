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

#ifndef ELA_OL_OFFLINE_H_
#define ELA_OL_OFFLINE_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ela/games/demonstrators.h"
#include "ela/games/env.h"
#include "ela/games/strategy.h"
#include "ela/games/trajectory.h"
#include "ela/nn/layers.h"
#include "ela/nn/params.h"

namespace ela::ol {

using nn::Matrix;

enum class FilterMode { kEla, kWt, kNone };

std::string FilterModeName(FilterMode mode);
FilterMode ParseFilterMode(std::string_view name);

struct FilterConfig {
  FilterMode mode = FilterMode::kNone;
  // Applied to min-max scaled EL; kept when scaled EL <= threshold.
  double el_threshold = 1.0;
};

using ElAssignment = std::map<games::TrajectoryKey, double>;

// ELA keeps trajectories with scaled EL <= threshold, WT keeps reward > 0 and
// NONE returns the input. Order and metadata are preserved. The result may
// contain games with only one of their two trajectories.
games::Dataset FilterDataset(const games::Dataset& dataset,
                             const ElAssignment* scaled_el,
                             const FilterConfig& config);

struct PolicyHyper {
  int hidden = 256;
  double lr = 5e-4;
  int epochs = 300;
  int minibatches = 50;

  nlohmann::json ToJson() const;
  static PolicyHyper FromJson(const nlohmann::json& j);
};

// Observation -> action distribution, an MLP with two ReLU hidden layers.
// Action probabilities are cached per observation key, so the key must
// determine the observation values (true for the built-in environments).
class Policy : public games::Strategy {
 public:
  Policy(int obs_width, int num_actions, const PolicyHyper& hyper,
         std::uint64_t seed);
  Policy(Policy&&) = default;

  std::vector<double> ActionProbs(const games::Observation& obs) const override;
  Matrix Logits(const Matrix& obs_rows) const;
  nn::Var ForwardLogits(nn::Tape& tape, nn::Var obs_rows) const;

  int obs_width() const { return obs_width_; }
  int num_actions() const { return num_actions_; }
  const PolicyHyper& hyper() const { return hyper_; }
  nn::ParamStore& store() { return store_; }
  const nn::ParamStore& store() const { return store_; }
  void ClearCache() const { cache_.clear(); }

 private:
  int obs_width_;
  int num_actions_;
  PolicyHyper hyper_;
  nn::ParamStore store_;
  nn::Mlp mlp_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

struct BcResult {
  Policy policy;
  // Mean per-step log-likelihood over each epoch's minibatches.
  std::vector<double> epoch_log_likelihood;
};

// Behavior cloning on all (observation, action) steps of the dataset with
// uniform step weighting. Each epoch shuffles the steps and splits them into
// `minibatches` Adam steps.
BcResult TrainBc(const games::Dataset& dataset, const PolicyHyper& hyper,
                 std::uint64_t seed);

void SavePolicy(const std::string& path, const Policy& policy,
                const nlohmann::json& extra_meta = nlohmann::json::object());
Policy LoadPolicy(const std::string& path);

// A player for evaluation: one strategy per seat.
struct Agent {
  std::string name;
  std::array<const games::Strategy*, 2> by_role{};
};

Agent AgentOf(const std::string& name, const games::Strategy& strategy);
Agent AgentOf(const games::Demonstrator& demonstrator);

struct Score {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t games = 0;
};

// Average score of `a` against `b` over `num_games` episodes, `a` taking
// seat 0 in even games and seat 1 in odd games. RPS scores each game by the
// sign of its total ((wins - losses) / games); Kuhn by chips won.
Score EvaluateAvgScore(const Agent& a, const Agent& b,
                       const games::EnvConfig& env, std::int64_t num_games,
                       std::uint64_t seed);

struct SupportedExploitability {
  // max over demonstrators of the negated expected reward of the strategy.
  double value = 0.0;
  // Per demonstrator, in pool order.
  std::vector<double> per_demonstrator;
  // True when every entry came from an exact computation.
  bool exact = true;
};

// Exact for RPS against stationary demonstrators (per-round reward units)
// and for Kuhn (chips per hand, seats averaged); otherwise simulates
// `num_games` games per demonstrator and uses the negated average score.
SupportedExploitability ComputeSupportedExploitability(
    const games::Strategy& strategy, const games::DemonstratorPool& pool,
    const games::EnvConfig& env, std::int64_t num_games, std::uint64_t seed);

// M(i, j) = score of agent j against agent i.
Matrix CrossEvaluate(const std::vector<Agent>& agents,
                     const games::EnvConfig& env, std::int64_t num_games,
                     std::uint64_t seed);

struct ThresholdTrial {
  double threshold = 0.0;
  std::size_t kept = 0;
  double supported_exploitability = 0.0;
};

struct ThresholdSearch {
  std::vector<ThresholdTrial> trials;
  double best_threshold = 1.0;
};

inline const std::vector<double>& DefaultThresholdGrid() {
  static const std::vector<double> grid = {0.2, 0.4, 0.6, 0.8, 1.0};
  return grid;
}

// Trains an ELA-BC policy per grid threshold and picks the one with the
// lowest supported exploitability (first in grid order on ties).
// Thresholds whose filter keeps nothing are skipped.
ThresholdSearch SearchThreshold(const games::Dataset& dataset,
                                const ElAssignment& scaled_el,
                                const std::vector<double>& grid,
                                const games::DemonstratorPool& pool,
                                const games::EnvConfig& env,
                                const PolicyHyper& hyper, std::uint64_t seed,
                                std::int64_t sim_games = 2000);

}  // namespace ela::ol

#endif  // ELA_OL_OFFLINE_H_
