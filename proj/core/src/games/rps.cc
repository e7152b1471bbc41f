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

#include "ela/games/rps.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::games {

std::string RpsActionName(int action) {
  switch (action) {
    case kRock: return "rock";
    case kPaper: return "paper";
    case kScissors: return "scissors";
    default: Fail(fmt::format("invalid RPS action {}", action));
  }
}

int ParseRpsAction(std::string_view name) {
  if (name == "rock") return kRock;
  if (name == "paper") return kPaper;
  if (name == "scissors") return kScissors;
  Fail(fmt::format("unknown RPS action '{}'", name));
}

Observation RpsObservation(int opponent_previous) {
  Observation obs;
  obs.values.assign(kRpsObservationWidth, 0.0);
  if (opponent_previous < 0) {
    obs.key = "start";
    obs.values[3] = 1.0;
  } else {
    obs.key = RpsActionName(opponent_previous);
    obs.values[opponent_previous] = 1.0;
  }
  return obs;
}

std::vector<std::string> RpsObservationKeys() {
  return {"start", "rock", "paper", "scissors"};
}

MixedStrategy RpsBiasedMixture(int preferred, double bias) {
  if (!(bias >= 0.0 && bias <= 1.0)) {
    Fail(fmt::format("RPS bias must lie in [0, 1], got {}", bias));
  }
  Check(preferred >= 0 && preferred < kRpsNumActions,
        "RPS preferred action out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Constant(3, (1.0 - bias) / 3.0);
  w[preferred] = (1.0 + 2.0 * bias) / 3.0;
  return MixedStrategy(std::move(w));
}

BehavioralStrategy RpsBiasedStrategy(int preferred, double bias) {
  return RpsStationaryStrategy(RpsBiasedMixture(preferred, bias));
}

BehavioralStrategy RpsStationaryStrategy(const MixedStrategy& mixture) {
  Check(mixture.size() == kRpsNumActions, "RPS mixture must have 3 weights");
  std::vector<double> row(mixture.weights().data(),
                          mixture.weights().data() + kRpsNumActions);
  BehavioralStrategy s;
  for (const auto& key : RpsObservationKeys()) s.Set(key, row);
  return s;
}

std::optional<MixedStrategy> RpsStationaryMixture(const Strategy& strategy,
                                                  double tol) {
  const std::vector<double> first = strategy.ActionProbs(RpsObservation(-1));
  Check(first.size() == kRpsNumActions, "RPS strategy must have 3 actions");
  for (int prev = 0; prev < kRpsNumActions; ++prev) {
    const std::vector<double> row = strategy.ActionProbs(RpsObservation(prev));
    for (int a = 0; a < kRpsNumActions; ++a) {
      if (std::abs(row[a] - first[a]) > tol) return std::nullopt;
    }
  }
  return MixedStrategy(Eigen::Map<const Eigen::VectorXd>(first.data(), 3));
}

MixedStrategy RpsEffectiveMixture(const Strategy& strategy,
                                  const MixedStrategy& opponent, int rounds) {
  Check(rounds >= 1, "RpsEffectiveMixture: rounds must be >= 1");
  Check(opponent.size() == kRpsNumActions, "RPS opponent must have 3 weights");
  auto as_vector = [](const std::vector<double>& p) {
    Check(p.size() == kRpsNumActions, "RPS strategy must have 3 actions");
    return Eigen::Map<const Eigen::VectorXd>(p.data(), 3).eval();
  };
  const Eigen::VectorXd opening = as_vector(strategy.ActionProbs(RpsObservation(-1)));
  Eigen::VectorXd reactive = Eigen::VectorXd::Zero(3);
  for (int prev = 0; prev < kRpsNumActions; ++prev) {
    reactive += opponent[prev] * as_vector(strategy.ActionProbs(RpsObservation(prev)));
  }
  Eigen::VectorXd mix = (opening + (rounds - 1) * reactive) / rounds;
  mix /= mix.sum();
  return MixedStrategy(std::move(mix));
}

}  // namespace ela::games
