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

#include "ela/simplex/bounds.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"
#include "ela/simplex/simplex.h"

namespace ela::simplex {
namespace {

using games::MatrixGame;
using games::MixedStrategy;

void CheckDistribution(std::span<const double> d, std::size_t size,
                       const std::string& what) {
  if (d.size() != size) {
    Fail(fmt::format("{} has {} entries, support has {}", what, d.size(), size));
  }
  double total = 0.0;
  for (double p : d) {
    if (!(p >= 0.0)) Fail(fmt::format("{} has a negative entry", what));
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(fmt::format("{} sums to {}, not 1", what, total));
  }
}

double L1(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<double> Toward(const std::vector<double>& from,
                           const std::vector<double>& to, double max_l1,
                           Rng& rng) {
  const double dist = L1(from, to);
  const double s = dist > 0.0 ? std::min(1.0, rng.Uniform() * max_l1 / dist) : 0.0;
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    out[i] = (1.0 - s) * from[i] + s * to[i];
  }
  return out;
}

}  // namespace

MatrixGame RandomSymmetricZeroSumGame(int n, Rng& rng) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      m(i, j) = 2.0 * rng.Uniform() - 1.0;
      m(j, i) = -m(i, j);
    }
  }
  return MatrixGame(std::move(m));
}

MixedStrategy RandomMixedStrategy(int n, Rng& rng) {
  if (n == 1) return MixedStrategy::Pure(1, 0);
  return MixedStrategy(SampleUniformSimplex(n, rng));
}

MixedStrategy Mix(std::span<const MixedStrategy> support,
                  std::span<const double> distribution) {
  Check(!support.empty(), "Mix: empty support");
  CheckDistribution(distribution, support.size(), "distribution");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(support.front().size());
  for (std::size_t k = 0; k < support.size(); ++k) {
    Check(support[k].size() == w.size(), "Mix: strategies differ in size");
    w += distribution[k] * support[k].weights();
  }
  w /= w.sum();
  return MixedStrategy(std::move(w));
}

MixtureBoundResult CheckMixtureBound(const MatrixGame& game,
                                     std::span<const MixedStrategy> support,
                                     std::span<const double> distribution) {
  const MixedStrategy mixture = Mix(support, distribution);
  MixtureBoundResult r;
  for (std::size_t k = 0; k < support.size(); ++k) {
    r.lhs += distribution[k] * games::Exploitability(game, support[k]);
  }
  r.rhs = games::Exploitability(game, mixture);
  r.holds = r.lhs >= r.rhs - 1e-9;
  return r;
}

NeighbourhoodBoundResult CheckNeighbourhoodBound(const NeighbourhoodInstance& inst) {
  const auto& support = inst.support;
  Check(!support.empty(), "premise violated: empty strategy support");
  CheckDistribution(inst.tau, support.size(), "premise violated: tau");
  Check(inst.alpha_delta >= 0.0, "premise violated: alpha*delta must be >= 0");
  Check(!inst.exploiters.empty(), "premise violated: no exploiters to test");
  for (std::size_t k = 0; k < inst.neighbours.size(); ++k) {
    CheckDistribution(inst.neighbours[k], support.size(),
                      fmt::format("premise violated: neighbour {}", k));
    const double d = L1(inst.tau, inst.neighbours[k]);
    if (d > inst.alpha_delta + 1e-12) {
      Fail(fmt::format("premise violated: neighbour {} has sum|tau - tau'| = {} "
                       "> alpha*delta = {}",
                       k, d, inst.alpha_delta));
    }
  }

  NeighbourhoodBoundResult r;
  r.epsilon1 = games::Exploitability(inst.game, Mix(support, inst.tau));
  r.payoff_bound = inst.game.payoff().cwiseAbs().maxCoeff();
  r.bound = r.epsilon1 + inst.alpha_delta * r.payoff_bound;

  std::vector<std::vector<double>> ensemble = inst.neighbours;
  ensemble.push_back(inst.tau);
  std::vector<MixedStrategy> mixtures;
  for (const auto& d : ensemble) {
    mixtures.push_back(Mix(support, d));
    r.max_l1 = std::max(r.max_l1, L1(inst.tau, d));
  }

  for (std::size_t e = 0; e < inst.exploiters.size(); ++e) {
    double loss_sum = 0.0;
    int losing = 0;
    for (std::size_t k = 0; k < mixtures.size(); ++k) {
      // Reward of the neighbour's strategy against the exploiter.
      const double reward =
          games::MatrixExpectedReward(inst.game, mixtures[k], inst.exploiters[e]);
      r.worst_loss = std::max(r.worst_loss, -reward);
      if (-reward > r.bound + 1e-12) {
        r.reward_bound_violation = true;
        r.details += fmt::format("exploiter {} vs neighbour {}: -r = {} > {}; ",
                                 e, k, -reward, r.bound);
      }
      if (reward <= 0.0) {
        loss_sum += std::max(0.0, -reward);
        ++losing;
      }
    }
    if (losing == 0) continue;  // conditioned set empty: nothing to bound
    const double el_delta = loss_sum / losing;
    r.max_el_delta = std::max(r.max_el_delta, el_delta);
    if (el_delta > r.bound + 1e-12) {
      r.el_bound_violation = true;
      r.details += fmt::format("exploiter {}: EL_delta = {} > {}; ", e,
                               el_delta, r.bound);
    }
  }
  return r;
}

NeighbourhoodInstance RandomNeighbourhoodInstance(Rng& rng) {
  const int n = 2 + rng.UniformInt(4);
  const int m = 1 + rng.UniformInt(6);
  NeighbourhoodInstance inst{RandomSymmetricZeroSumGame(n, rng), {}, {}, {},
                            0.0, {}};
  for (int k = 0; k < m; ++k) inst.support.push_back(RandomMixedStrategy(n, rng));
  inst.tau = m == 1 ? std::vector<double>{1.0}
                    : ToVector(SampleUniformSimplex(m, rng));
  inst.alpha_delta = 0.6 * rng.Uniform();
  const int num_neighbours = 2 + rng.UniformInt(8);
  for (int k = 0; k < num_neighbours; ++k) {
    const std::vector<double> target =
        m == 1 ? std::vector<double>{1.0} : ToVector(SampleUniformSimplex(m, rng));
    inst.neighbours.push_back(Toward(inst.tau, target, inst.alpha_delta, rng));
  }
  for (int i = 0; i < n; ++i) inst.exploiters.push_back(MixedStrategy::Pure(n, i));
  for (int k = 0; k < 3; ++k) inst.exploiters.push_back(RandomMixedStrategy(n, rng));
  return inst;
}

NeighbourhoodInstance RpsNeighbourhoodInstance(double alpha_delta, Rng& rng) {
  NeighbourhoodInstance inst{games::RockPaperScissors(), {}, {1.0 / 3, 1.0 / 3, 1.0 / 3},
                            {}, alpha_delta, {}};
  for (int i = 0; i < 3; ++i) inst.support.push_back(MixedStrategy::Pure(3, i));
  for (int k = 0; k < 16; ++k) {
    inst.neighbours.push_back(
        Toward(inst.tau, ToVector(SampleUniformSimplex(3, rng)), alpha_delta, rng));
  }
  // Pure vertices at maximal distance as well.
  for (int i = 0; i < 3; ++i) {
    std::vector<double> vertex(3, 0.0);
    vertex[i] = 1.0;
    const double dist = L1(inst.tau, vertex);
    const double s = std::min(1.0, alpha_delta / dist);
    std::vector<double> d(3);
    for (int j = 0; j < 3; ++j) d[j] = (1.0 - s) * inst.tau[j] + s * vertex[j];
    inst.neighbours.push_back(d);
  }
  for (int i = 0; i < 3; ++i) inst.exploiters.push_back(MixedStrategy::Pure(3, i));
  for (int k = 0; k < 3; ++k) inst.exploiters.push_back(RandomMixedStrategy(3, rng));
  return inst;
}

}  // namespace ela::simplex
