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

#ifndef ELA_GAMES_RPS_H_
#define ELA_GAMES_RPS_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ela/games/matrix_game.h"
#include "ela/games/strategy.h"

namespace ela::games {

inline constexpr int kRpsNumActions = 3;
// One-hot of the opponent's previous action plus a game-start symbol.
inline constexpr int kRpsObservationWidth = 4;
inline constexpr int kRock = 0;
inline constexpr int kPaper = 1;
inline constexpr int kScissors = 2;

std::string RpsActionName(int action);
int ParseRpsAction(std::string_view name);

// opponent_previous = -1 encodes the first round.
Observation RpsObservation(int opponent_previous);
// "start", "rock", "paper", "scissors".
std::vector<std::string> RpsObservationKeys();

// pi(preferred) = (1 + 2p) / 3 and (1 - p) / 3 for each other action, at
// every observation.
BehavioralStrategy RpsBiasedStrategy(int preferred, double bias);
MixedStrategy RpsBiasedMixture(int preferred, double bias);

// Plays `mixture` regardless of the observation.
BehavioralStrategy RpsStationaryStrategy(const MixedStrategy& mixture);

// The mixture a strategy plays if it is identical at every RPS observation
// (within tol), otherwise nullopt.
std::optional<MixedStrategy> RpsStationaryMixture(const Strategy& strategy,
                                                  double tol = 1e-12);

// Per-round average action distribution of a (possibly reactive) strategy
// over `rounds` rounds against an opponent that plays `opponent` i.i.d.
MixedStrategy RpsEffectiveMixture(const Strategy& strategy,
                                  const MixedStrategy& opponent, int rounds);

}  // namespace ela::games

#endif  // ELA_GAMES_RPS_H_
