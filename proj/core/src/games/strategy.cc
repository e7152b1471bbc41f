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

#include "ela/games/strategy.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::games {

void BehavioralStrategy::Set(const std::string& key,
                             std::vector<double> probs) {
  Check(!probs.empty(), fmt::format("strategy row '{}' is empty", key));
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      Fail(fmt::format("strategy row '{}' has invalid probability {}", key, p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(fmt::format("strategy row '{}' sums to {}", key, total));
  }
  table_[key] = std::move(probs);
}

const std::vector<double>& BehavioralStrategy::Probs(
    const std::string& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) {
    Fail(fmt::format("strategy undefined at observation '{}'", key));
  }
  return it->second;
}

double ReachProbability(const BehavioralStrategy& strategy,
                        std::span<const std::pair<std::string, int>> path) {
  double reach = 1.0;
  for (const auto& [key, action] : path) {
    const auto& probs = strategy.Probs(key);
    if (action < 0 || action >= static_cast<int>(probs.size())) {
      Fail(fmt::format("action {} is not legal at observation '{}'", action,
                       key));
    }
    reach *= probs[action];
  }
  return reach;
}

}  // namespace ela::games
