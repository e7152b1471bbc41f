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

#include "ela/simplex/simplex.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::simplex {

Eigen::VectorXd SampleUniformSimplex(int n, Rng& rng) {
  if (n < 2) Fail(fmt::format("simplex dimension n must be >= 2, got {}", n));
  Eigen::VectorXd a(n);
  for (int i = 0; i < n; ++i) a[i] = rng.Exponential();
  return a / a.sum();
}

double PureRewardProfile::Exploitability() const {
  return (-rewards).maxCoeff();
}

bool PureRewardProfile::IsSingleExploiter() const {
  return (rewards.array() < 0.0).count() <= 1;
}

PureRewardProfile RandomSingleExploiterProfile(int n, Rng& rng) {
  Check(n >= 2, "profile needs n >= 2");
  PureRewardProfile p;
  p.rewards.resize(n);
  for (int i = 0; i < n; ++i) p.rewards[i] = rng.Uniform();
  const int exploiter = rng.UniformInt(n);
  p.rewards[exploiter] = -(0.05 + 0.95 * (1.0 - rng.Uniform()));
  return p;
}

ElEstimate ElMonteCarlo(const PureRewardProfile& profile, std::int64_t samples,
                        Rng& rng) {
  Check(samples >= 1, "ElMonteCarlo: samples must be >= 1");
  if (!(profile.rewards.array() < 0.0).any()) {
    Fail("condition event has zero probability");
  }
  const int n = profile.size();
  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd a = SampleUniformSimplex(n, rng);
    const double r = a.dot(profile.rewards);
    if (r <= 0.0) {
      ++hits;
      sum += -r;
      sum_sq += r * r;
    }
  }
  if (hits == 0) Fail("condition event has zero probability");
  ElEstimate est;
  est.samples = samples;
  est.conditioned = hits;
  est.conditioning_rate = static_cast<double>(hits) / samples;
  est.el = sum / hits;
  const double var =
      hits > 1 ? std::max(0.0, (sum_sq - hits * est.el * est.el) / (hits - 1))
               : 0.0;
  est.std_error = std::sqrt(var / hits);
  return est;
}

ProportionalityReport ProportionalityCheck(
    std::span<const PureRewardProfile> profiles, std::int64_t samples,
    std::uint64_t seed) {
  Check(!profiles.empty(), "ProportionalityCheck: no profiles");
  const int n = profiles.front().size();
  ProportionalityReport report;
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const PureRewardProfile& p = profiles[k];
    Check(p.size() == n, "ProportionalityCheck: profiles differ in size");
    Check(p.IsSingleExploiter(),
          fmt::format("profile {} has more than one exploiting pure strategy", k));
    const double e = p.Exploitability();
    if (!(e > 0.0)) {
      Fail(fmt::format("profile {} has no exploiter; EL/E is undefined", k));
    }
    Rng rng(DeriveSeed(seed, k));
    const ElEstimate est = ElMonteCarlo(p, samples, rng);
    const double ratio = est.el / e;
    const double se = est.std_error / e;
    report.exploitability.push_back(e);
    report.estimates.push_back(est);
    report.ratios.push_back(ratio);
    report.ratio_std_errors.push_back(se);
    const double w = se > 0.0 ? 1.0 / (se * se) : 1.0;
    weight_sum += w;
    weighted += w * ratio;
  }
  report.pooled_ratio = weighted / weight_sum;
  report.pooled_std_error = std::sqrt(1.0 / weight_sum);
  for (std::size_t k = 0; k < report.ratios.size(); ++k) {
    const double dev = std::abs(report.ratios[k] - report.pooled_ratio);
    const double se = std::hypot(report.ratio_std_errors[k],
                                 report.pooled_std_error);
    report.max_relative_spread =
        std::max(report.max_relative_spread, dev / report.pooled_ratio);
    if (se > 0.0) report.max_z = std::max(report.max_z, dev / se);
  }
  return report;
}

}  // namespace ela::simplex
