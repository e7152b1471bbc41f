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

#ifndef ELA_GAMES_KUHN_H_
#define ELA_GAMES_KUHN_H_

#include <string>
#include <string_view>
#include <vector>

#include "ela/games/strategy.h"

namespace ela::games {

// Kuhn poker: three cards, one-chip ante, single one-chip bet. Player 0 acts
// first. Action 0 is pass (check or fold), action 1 is bet (bet or call).
inline constexpr int kKuhnNumActions = 2;
// Own-card one-hot (3) followed by two flags per betting slot (3 slots).
inline constexpr int kKuhnObservationWidth = 9;
inline constexpr int kKuhnNumCards = 3;
inline constexpr int kPass = 0;
inline constexpr int kBet = 1;

char KuhnCardName(int card);

// Information-state key, e.g. "J:" or "Q:pb".
std::string KuhnInfosetKey(int card, std::string_view history);
Observation KuhnObservation(int card, std::string_view history);

// Decision histories of a role: {"", "pb"} for player 0, {"p", "b"} for 1.
std::vector<std::string> KuhnDecisionHistories(int role);
std::vector<std::string> KuhnInfosetKeys(int role);

bool KuhnIsTerminal(std::string_view history);
// Player-0 reward at a terminal history.
double KuhnTerminalReward(int card0, int card1, std::string_view history);

// Nash family for player 0 parameterized by alpha in [0, 1/3], together with
// player 1's equilibrium strategy. The table covers both roles.
BehavioralStrategy KuhnNashStrategy(double alpha);
// Nash(alpha = 0) except that neither role ever bluffs with a jack.
BehavioralStrategy KuhnNeverBluffStrategy();
BehavioralStrategy KuhnAlwaysBetStrategy();
BehavioralStrategy KuhnAlwaysPassStrategy();
BehavioralStrategy KuhnUniformStrategy();
// (1 - eps) * Nash(alpha = 0) + eps * uniform at every information state.
BehavioralStrategy KuhnNoisyNashStrategy(double eps);

// Exact player-0 expected reward by enumerating deals and betting sequences.
double KuhnExpectedValue(const Strategy& player0, const Strategy& player1);
// Player-0 expected reward for a fixed deal.
double KuhnDealValue(int card0, int card1, const Strategy& player0,
                     const Strategy& player1);

struct KuhnBestResponseResult {
  // Deterministic strategy over the exploiter's information states.
  BehavioralStrategy strategy;
  // Exploiter's expected reward.
  double value = 0.0;
};

// Exact best response against `strategy` playing as `role`; the exploiter
// takes the other seat. Ties are broken towards pass.
KuhnBestResponseResult KuhnBestResponse(const Strategy& strategy, int role);

// Exploitability of a demonstrator that plays `role0` as player 0 and
// `role1` as player 1, with seats assigned uniformly at random.
double KuhnExploitability(const Strategy& role0, const Strategy& role1);

}  // namespace ela::games

#endif  // ELA_GAMES_KUHN_H_
