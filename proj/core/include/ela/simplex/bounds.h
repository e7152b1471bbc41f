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

#ifndef ELA_SIMPLEX_BOUNDS_H_
#define ELA_SIMPLEX_BOUNDS_H_

#include <span>
#include <string>
#include <vector>

#include "ela/common/rng.h"
#include "ela/games/matrix_game.h"

namespace ela::simplex {

// Random antisymmetric n x n payoff with entries in [-1, 1].
games::MatrixGame RandomSymmetricZeroSumGame(int n, Rng& rng);
games::MixedStrategy RandomMixedStrategy(int n, Rng& rng);

// Mixture sum_k distribution[k] * support[k].
games::MixedStrategy Mix(std::span<const games::MixedStrategy> support,
                         std::span<const double> distribution);

// Exploitability of a mixture against the mixture of exploitabilities.
struct MixtureBoundResult {
  double lhs = 0.0;  // sum_k tau_k * E(pi_k)
  double rhs = 0.0;  // E(sum_k tau_k * pi_k)
  bool holds = false;  // lhs >= rhs - 1e-9
};

MixtureBoundResult CheckMixtureBound(
    const games::MatrixGame& game,
    std::span<const games::MixedStrategy> support,
    std::span<const double> distribution);

// Finite-support version of the neighbourhood bound: trajectories tau' whose
// strategy distributions are within L1 distance alpha_delta of tau. Every
// exploiter's conditioned mean loss against the neighbourhood is bounded by
// epsilon1 + alpha_delta * M, where epsilon1 = E(pi(tau)) and M bounds
// |payoff|.
struct NeighbourhoodInstance {
  games::MatrixGame game;
  std::vector<games::MixedStrategy> support;
  std::vector<double> tau;
  // Neighbour distributions over `support`; tau itself is always included.
  std::vector<std::vector<double>> neighbours;
  double alpha_delta = 0.0;
  std::vector<games::MixedStrategy> exploiters;
};

struct NeighbourhoodBoundResult {
  double epsilon1 = 0.0;
  double payoff_bound = 0.0;  // M
  double max_l1 = 0.0;        // largest realized sum |tau - tau'|
  double bound = 0.0;         // epsilon1 + alpha_delta * M
  double worst_loss = 0.0;    // max over exploiters and neighbours of -r
  double max_el_delta = 0.0;  // max over exploiters of EL_delta
  bool reward_bound_violation = false;
  bool el_bound_violation = false;
  std::string details;
};

// Throws naming the violated premise when a distribution is invalid or a
// neighbour lies farther than alpha_delta from tau.
NeighbourhoodBoundResult CheckNeighbourhoodBound(const NeighbourhoodInstance& instance);

// Random instance over a random game and support. The RPS variant uses the
// three pure strategies as support with tau at the uniform distribution.
NeighbourhoodInstance RandomNeighbourhoodInstance(Rng& rng);
NeighbourhoodInstance RpsNeighbourhoodInstance(double alpha_delta, Rng& rng);

}  // namespace ela::simplex

#endif  // ELA_SIMPLEX_BOUNDS_H_
