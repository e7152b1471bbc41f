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

#ifndef ELA_GAMES_ENV_H_
#define ELA_GAMES_ENV_H_

#include <string>
#include <string_view>
#include <utility>

#include "ela/common/rng.h"
#include "ela/games/strategy.h"
#include "ela/games/trajectory.h"

namespace ela::games {

enum class EnvKind { kRps, kKuhn };

struct EnvConfig {
  EnvKind kind = EnvKind::kRps;
  // Rounds per repeated-RPS episode. Ignored for Kuhn.
  int rps_rounds = 500;

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

std::string EnvName(EnvKind kind);
EnvKind ParseEnvKind(std::string_view name);

int ObservationWidth(EnvKind kind);
int NumActions(EnvKind kind);

// Plays one episode with `seat0` and `seat1` and returns the two
// trajectories (game_id left at 0, tags empty). Terminal rewards sum to 0.
std::pair<Trajectory, Trajectory> PlayEpisode(const EnvConfig& env,
                                              const Strategy& seat0,
                                              const Strategy& seat1, Rng& rng);

// Samples an action from a strategy's distribution, validating its width.
int SampleAction(const Strategy& strategy, const Observation& obs,
                 int num_actions, Rng& rng);

}  // namespace ela::games

#endif  // ELA_GAMES_ENV_H_
