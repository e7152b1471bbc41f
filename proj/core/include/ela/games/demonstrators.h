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

#ifndef ELA_GAMES_DEMONSTRATORS_H_
#define ELA_GAMES_DEMONSTRATORS_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ela/games/env.h"
#include "ela/games/strategy.h"
#include "ela/games/trajectory.h"

namespace ela::games {

// A demonstrator is a strategy pair, one per seat. In the symmetric game
// both entries coincide.
struct Demonstrator {
  std::string tag;
  std::string name;
  double param = 0.0;
  double weight = 0.0;
  std::array<BehavioralStrategy, 2> by_role;
};

class DemonstratorPool {
 public:
  // Weights must be non-negative and sum to 1 within 1e-9.
  DemonstratorPool(EnvKind env, std::vector<Demonstrator> entries,
                   std::string spec = "");

  EnvKind env() const { return env_; }
  const std::vector<Demonstrator>& entries() const { return entries_; }
  const std::string& spec() const { return spec_; }
  std::size_t size() const { return entries_.size(); }

  const Demonstrator& Sample(Rng& rng) const;

 private:
  EnvKind env_;
  std::vector<Demonstrator> entries_;
  std::vector<double> weights_;
  std::string spec_;
};

// Parses a comma-separated list of name:param:weight entries; weights are
// normalized. RPS names: uniform, rock, paper, scissors (param = bias) and
// biased (expands to all three preferred actions with weight split evenly).
// Kuhn names: nash (param = alpha), never-bluff, always-bet, always-pass,
// uniform, noisy (param = mixing weight towards uniform).
DemonstratorPool ParsePoolSpec(EnvKind env, std::string_view spec);

// Exact exploitability of a demonstrator in the seat-symmetrized game, in
// per-round reward units for RPS and chips per hand for Kuhn.
double DemonstratorExploitability(EnvKind env, const Demonstrator& d);

// Plays `num_games` episodes. For each game two demonstrators are drawn
// independently by weight and seats are assigned uniformly at random. Each
// game draws from its own child seed, so output is independent of
// scheduling.
Dataset GenerateDataset(const DemonstratorPool& pool, std::int64_t num_games,
                        const EnvConfig& env, std::uint64_t seed);

}  // namespace ela::games

#endif  // ELA_GAMES_DEMONSTRATORS_H_
