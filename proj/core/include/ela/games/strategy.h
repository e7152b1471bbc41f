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

#ifndef ELA_GAMES_STRATEGY_H_
#define ELA_GAMES_STRATEGY_H_

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ela::games {

// What a player sees at a decision point. `key` identifies the information
// state; `values` is the fixed-width encoding consumed by learners.
struct Observation {
  std::string key;
  std::vector<double> values;
};

// Anything that maps an observation to a distribution over actions.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::vector<double> ActionProbs(const Observation& obs) const = 0;
};

// Tabular strategy keyed by observation key.
class BehavioralStrategy : public Strategy {
 public:
  BehavioralStrategy() = default;

  // Every row must be a probability distribution within 1e-9.
  void Set(const std::string& key, std::vector<double> probs);
  bool Has(const std::string& key) const { return table_.contains(key); }

  // Throws "strategy undefined at observation <key>" for unknown keys.
  const std::vector<double>& Probs(const std::string& key) const;
  std::vector<double> ActionProbs(const Observation& obs) const override {
    return Probs(obs.key);
  }

  const std::map<std::string, std::vector<double>>& table() const {
    return table_;
  }

  friend bool operator==(const BehavioralStrategy& a,
                         const BehavioralStrategy& b) {
    return a.table_ == b.table_;
  }

 private:
  std::map<std::string, std::vector<double>> table_;
};

// Product of the strategy's action probabilities along a path of
// (observation key, action) pairs. The empty path has probability 1.
double ReachProbability(const BehavioralStrategy& strategy,
                        std::span<const std::pair<std::string, int>> path);

}  // namespace ela::games

#endif  // ELA_GAMES_STRATEGY_H_
