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

#include "ela/games/kuhn.h"

#include <array>
#include <string>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::games {
namespace {

int ActingPlayer(std::string_view history) {
  return static_cast<int>(history.size() % 2);
}

std::vector<double> CheckedProbs(const Strategy& s, const Observation& obs) {
  std::vector<double> p = s.ActionProbs(obs);
  if (p.size() != kKuhnNumActions) {
    Fail(fmt::format("Kuhn strategy returned {} probabilities at '{}'",
                     p.size(), obs.key));
  }
  return p;
}

double SubtreeValue(const std::array<int, 2>& cards, const std::string& history,
                    const Strategy& p0, const Strategy& p1) {
  if (KuhnIsTerminal(history)) {
    return KuhnTerminalReward(cards[0], cards[1], history);
  }
  const int player = ActingPlayer(history);
  const Strategy& s = player == 0 ? p0 : p1;
  const std::vector<double> probs =
      CheckedProbs(s, KuhnObservation(cards[player], history));
  double value = 0.0;
  for (int a = 0; a < kKuhnNumActions; ++a) {
    if (probs[a] == 0.0) continue;
    value += probs[a] * SubtreeValue(cards, history + (a == kPass ? 'p' : 'b'),
                                     p0, p1);
  }
  return value;
}

// Two-row table, one row per action: {pass, bet}.
std::vector<double> Row(double bet) { return {1.0 - bet, bet}; }

}  // namespace

char KuhnCardName(int card) {
  Check(card >= 0 && card < kKuhnNumCards, "Kuhn card out of range");
  return "JQK"[card];
}

std::string KuhnInfosetKey(int card, std::string_view history) {
  return fmt::format("{}:{}", KuhnCardName(card), history);
}

Observation KuhnObservation(int card, std::string_view history) {
  Check(history.size() <= 3, "Kuhn history too long");
  Observation obs;
  obs.key = KuhnInfosetKey(card, history);
  obs.values.assign(kKuhnObservationWidth, 0.0);
  obs.values[card] = 1.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const char c = history[i];
    Check(c == 'p' || c == 'b', "Kuhn history must contain only 'p'/'b'");
    obs.values[3 + 2 * i + (c == 'b' ? 1 : 0)] = 1.0;
  }
  return obs;
}

std::vector<std::string> KuhnDecisionHistories(int role) {
  Check(role == 0 || role == 1, "Kuhn role must be 0 or 1");
  if (role == 0) return {"", "pb"};
  return {"p", "b"};
}

std::vector<std::string> KuhnInfosetKeys(int role) {
  std::vector<std::string> keys;
  for (int card = 0; card < kKuhnNumCards; ++card) {
    for (const auto& h : KuhnDecisionHistories(role)) {
      keys.push_back(KuhnInfosetKey(card, h));
    }
  }
  return keys;
}

bool KuhnIsTerminal(std::string_view h) {
  return h == "pp" || h == "bp" || h == "bb" || h == "pbp" || h == "pbb";
}

double KuhnTerminalReward(int card0, int card1, std::string_view h) {
  Check(card0 != card1, "Kuhn deal must use distinct cards");
  const double showdown = card0 > card1 ? 1.0 : -1.0;
  if (h == "pp") return showdown;
  if (h == "bp") return 1.0;
  if (h == "pbp") return -1.0;
  if (h == "bb" || h == "pbb") return 2.0 * showdown;
  Fail(fmt::format("'{}' is not a terminal Kuhn history", h));
}

BehavioralStrategy KuhnNashStrategy(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0 / 3.0 + 1e-15)) {
    Fail(fmt::format("Kuhn Nash alpha must lie in [0, 1/3], got {}", alpha));
  }
  BehavioralStrategy s;
  // Player 0.
  s.Set("J:", Row(alpha));
  s.Set("Q:", Row(0.0));
  s.Set("K:", Row(3.0 * alpha));
  s.Set("J:pb", Row(0.0));
  s.Set("Q:pb", Row(alpha + 1.0 / 3.0));
  s.Set("K:pb", Row(1.0));
  // Player 1.
  s.Set("J:p", Row(1.0 / 3.0));
  s.Set("Q:p", Row(0.0));
  s.Set("K:p", Row(1.0));
  s.Set("J:b", Row(0.0));
  s.Set("Q:b", Row(1.0 / 3.0));
  s.Set("K:b", Row(1.0));
  return s;
}

BehavioralStrategy KuhnNeverBluffStrategy() {
  BehavioralStrategy s = KuhnNashStrategy(0.0);
  s.Set("J:", Row(0.0));
  s.Set("J:p", Row(0.0));
  return s;
}

namespace {
BehavioralStrategy Constant(double bet) {
  BehavioralStrategy s;
  for (int role = 0; role < 2; ++role) {
    for (const auto& key : KuhnInfosetKeys(role)) s.Set(key, Row(bet));
  }
  return s;
}
}  // namespace

BehavioralStrategy KuhnAlwaysBetStrategy() { return Constant(1.0); }
BehavioralStrategy KuhnAlwaysPassStrategy() { return Constant(0.0); }
BehavioralStrategy KuhnUniformStrategy() { return Constant(0.5); }

BehavioralStrategy KuhnNoisyNashStrategy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    Fail(fmt::format("Kuhn noise level must lie in [0, 1], got {}", eps));
  }
  const BehavioralStrategy nash = KuhnNashStrategy(0.0);
  BehavioralStrategy s;
  for (const auto& [key, row] : nash.table()) {
    s.Set(key, {(1.0 - eps) * row[0] + eps * 0.5,
                (1.0 - eps) * row[1] + eps * 0.5});
  }
  return s;
}

double KuhnDealValue(int card0, int card1, const Strategy& player0,
                     const Strategy& player1) {
  return SubtreeValue({card0, card1}, "", player0, player1);
}

double KuhnExpectedValue(const Strategy& player0, const Strategy& player1) {
  double value = 0.0;
  for (int c0 = 0; c0 < kKuhnNumCards; ++c0) {
    for (int c1 = 0; c1 < kKuhnNumCards; ++c1) {
      if (c0 == c1) continue;
      value += KuhnDealValue(c0, c1, player0, player1) / 6.0;
    }
  }
  return value;
}

KuhnBestResponseResult KuhnBestResponse(const Strategy& strategy, int role) {
  Check(role == 0 || role == 1, "Kuhn role must be 0 or 1");
  // Validates coverage up front so incomplete tables fail loudly.
  for (int card = 0; card < kKuhnNumCards; ++card) {
    for (const auto& h : KuhnDecisionHistories(role)) {
      CheckedProbs(strategy, KuhnObservation(card, h));
    }
  }
  const int exploiter = 1 - role;
  const std::vector<std::string> histories = KuhnDecisionHistories(exploiter);
  KuhnBestResponseResult result;
  for (int card = 0; card < kKuhnNumCards; ++card) {
    // The exploiter's information states for one card are independent of the
    // other cards, so the best response is the best of the four pure plans
    // over this card's two decision points.
    double best_value = 0.0;
    int best_plan = -1;
    for (int plan = 0; plan < 4; ++plan) {
      BehavioralStrategy pure;
      const int a0 = plan & 1;
      const int a1 = (plan >> 1) & 1;
      pure.Set(KuhnInfosetKey(card, histories[0]), Row(a0));
      pure.Set(KuhnInfosetKey(card, histories[1]), Row(a1));
      double value = 0.0;
      for (int other = 0; other < kKuhnNumCards; ++other) {
        if (other == card) continue;
        const double p0_value =
            exploiter == 0 ? KuhnDealValue(card, other, pure, strategy)
                           : KuhnDealValue(other, card, strategy, pure);
        value += 0.5 * (exploiter == 0 ? p0_value : -p0_value);
      }
      if (best_plan < 0 || value > best_value + 1e-15) {
        best_value = value;
        best_plan = plan;
      }
    }
    result.strategy.Set(KuhnInfosetKey(card, histories[0]), Row(best_plan & 1));
    result.strategy.Set(KuhnInfosetKey(card, histories[1]),
                        Row((best_plan >> 1) & 1));
    result.value += best_value / kKuhnNumCards;
  }
  return result;
}

double KuhnExploitability(const Strategy& role0, const Strategy& role1) {
  return 0.5 * (KuhnBestResponse(role0, 0).value +
                KuhnBestResponse(role1, 1).value);
}

}  // namespace ela::games
