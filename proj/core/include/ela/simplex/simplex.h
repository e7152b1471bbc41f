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

#ifndef ELA_SIMPLEX_SIMPLEX_H_
#define ELA_SIMPLEX_SIMPLEX_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ela/common/rng.h"

namespace ela::simplex {

// Uniform draw from the (n-1)-dimensional standard simplex, obtained by
// normalizing n independent unit-rate exponentials. n >= 2.
Eigen::VectorXd SampleUniformSimplex(int n, Rng& rng);

// rewards[i] is the reward of the evaluated strategy against pure strategy
// i. When the opponent plays weights a, the evaluated strategy earns
// sum_i a_i * rewards[i].
struct PureRewardProfile {
  Eigen::VectorXd rewards;

  int size() const { return static_cast<int>(rewards.size()); }
  // max_i(-rewards[i]): what the best pure exploiter gains.
  double Exploitability() const;
  // At most one strictly negative entry.
  bool IsSingleExploiter() const;
};

// A random profile with exactly one negative entry (uniform magnitude in
// (0.05, 1]) and all other entries in [0, 1].
PureRewardProfile RandomSingleExploiterProfile(int n, Rng& rng);

struct ElEstimate {
  // Monte-Carlo estimate of E[-r | r <= 0] with r = sum_i a_i rewards[i]
  // and a uniform on the simplex.
  double el = 0.0;
  double std_error = 0.0;
  // Fraction of draws satisfying r <= 0.
  double conditioning_rate = 0.0;
  std::int64_t conditioned = 0;
  std::int64_t samples = 0;
};

// Throws "condition event has zero probability" when no entry of the
// profile is strictly negative, or when no draw lands in the event.
ElEstimate ElMonteCarlo(const PureRewardProfile& profile, std::int64_t samples,
                        Rng& rng);

struct ProportionalityReport {
  std::vector<double> exploitability;
  std::vector<ElEstimate> estimates;
  std::vector<double> ratios;
  std::vector<double> ratio_std_errors;
  // Inverse-variance weighted mean ratio and its standard error.
  double pooled_ratio = 0.0;
  double pooled_std_error = 0.0;
  // max_k |ratio_k - pooled| / pooled.
  double max_relative_spread = 0.0;
  // max_k |ratio_k - pooled| / sqrt(se_k^2 + se_pooled^2).
  double max_z = 0.0;
};

// EL / E for each single-exploiter profile. Profile k uses the child stream
// DeriveSeed(seed, k).
ProportionalityReport ProportionalityCheck(
    std::span<const PureRewardProfile> profiles, std::int64_t samples,
    std::uint64_t seed);

}  // namespace ela::simplex

#endif  // ELA_SIMPLEX_SIMPLEX_H_
