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

#include "ela/games/env.h"

#include <array>
#include <string>

#include <fmt/format.h>

#include "ela/common/error.h"
#include "ela/games/kuhn.h"
#include "ela/games/rps.h"

namespace ela::games {
namespace {

std::pair<Trajectory, Trajectory> PlayRps(int rounds, const Strategy& seat0,
                                          const Strategy& seat1, Rng& rng) {
  Check(rounds >= 1, "RPS episode needs at least one round");
  std::array<Trajectory, 2> traj;
  traj[0].player_index = 0;
  traj[1].player_index = 1;
  std::array<int, 2> previous = {-1, -1};
  double reward0 = 0.0;
  for (int t = 0; t < rounds; ++t) {
    const Observation obs0 = RpsObservation(previous[1]);
    const Observation obs1 = RpsObservation(previous[0]);
    const int a0 = SampleAction(seat0, obs0, kRpsNumActions, rng);
    const int a1 = SampleAction(seat1, obs1, kRpsNumActions, rng);
    traj[0].steps.push_back({obs0.values, a0});
    traj[1].steps.push_back({obs1.values, a1});
    // (a0 - a1) mod 3 == 1 means seat 0 wins.
    const int diff = (a0 - a1 + 3) % 3;
    if (diff == 1) reward0 += 1.0;
    if (diff == 2) reward0 -= 1.0;
    previous = {a0, a1};
  }
  traj[0].reward = reward0;
  traj[1].reward = -reward0;
  return {std::move(traj[0]), std::move(traj[1])};
}

std::pair<Trajectory, Trajectory> PlayKuhn(const Strategy& seat0,
                                           const Strategy& seat1, Rng& rng) {
  std::array<int, 2> cards;
  cards[0] = rng.UniformInt(kKuhnNumCards);
  cards[1] = (cards[0] + 1 + rng.UniformInt(kKuhnNumCards - 1)) % kKuhnNumCards;
  std::array<Trajectory, 2> traj;
  traj[0].player_index = 0;
  traj[1].player_index = 1;
  std::string history;
  while (!KuhnIsTerminal(history)) {
    const int player = static_cast<int>(history.size() % 2);
    const Observation obs = KuhnObservation(cards[player], history);
    const int a = SampleAction(player == 0 ? seat0 : seat1, obs,
                               kKuhnNumActions, rng);
    traj[player].steps.push_back({obs.values, a});
    history += a == kPass ? 'p' : 'b';
  }
  const double reward0 = KuhnTerminalReward(cards[0], cards[1], history);
  traj[0].reward = reward0;
  traj[1].reward = -reward0;
  return {std::move(traj[0]), std::move(traj[1])};
}

}  // namespace

std::string EnvName(EnvKind kind) {
  return kind == EnvKind::kRps ? "rps" : "kuhn";
}

EnvKind ParseEnvKind(std::string_view name) {
  if (name == "rps") return EnvKind::kRps;
  if (name == "kuhn") return EnvKind::kKuhn;
  Fail(fmt::format("unknown environment '{}' (expected rps or kuhn)", name));
}

int ObservationWidth(EnvKind kind) {
  return kind == EnvKind::kRps ? kRpsObservationWidth : kKuhnObservationWidth;
}

int NumActions(EnvKind kind) {
  return kind == EnvKind::kRps ? kRpsNumActions : kKuhnNumActions;
}

int SampleAction(const Strategy& strategy, const Observation& obs,
                 int num_actions, Rng& rng) {
  const std::vector<double> probs = strategy.ActionProbs(obs);
  if (static_cast<int>(probs.size()) != num_actions) {
    Fail(fmt::format("strategy returned {} probabilities at observation '{}', "
                     "expected {}",
                     probs.size(), obs.key, num_actions));
  }
  return rng.Categorical(probs);
}

std::pair<Trajectory, Trajectory> PlayEpisode(const EnvConfig& env,
                                              const Strategy& seat0,
                                              const Strategy& seat1, Rng& rng) {
  switch (env.kind) {
    case EnvKind::kRps: return PlayRps(env.rps_rounds, seat0, seat1, rng);
    case EnvKind::kKuhn: return PlayKuhn(seat0, seat1, rng);
  }
  Fail("unknown environment");
}

}  // namespace ela::games
