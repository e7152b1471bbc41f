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

#include "ela/nn/gaussian.h"

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {
namespace {

void CheckDims(const DiagGaussian& q, const DiagGaussian& p) {
  const auto k = q.mean.size();
  if (q.log_std.size() != k || p.mean.size() != k || p.log_std.size() != k) {
    Fail(fmt::format("diagonal Gaussian dimension mismatch: q ({}, {}), p ({}, {})",
                     q.mean.size(), q.log_std.size(), p.mean.size(),
                     p.log_std.size()));
  }
}

}  // namespace

double KlDiagGaussianValue(const DiagGaussian& q, const DiagGaussian& p) {
  CheckDims(q, p);
  const Eigen::ArrayXd d = (q.mean - p.mean).array();
  const Eigen::ArrayXd var_q = (2.0 * q.log_std.array()).exp();
  const Eigen::ArrayXd var_p = (2.0 * p.log_std.array()).exp();
  return (p.log_std.array() - q.log_std.array() +
          0.5 * (var_q + d * d) / var_p - 0.5)
      .sum();
}

double LiteralRegularizerValue(const DiagGaussian& q, const DiagGaussian& p) {
  CheckDims(q, p);
  const Eigen::ArrayXd s_q = q.log_std.array().exp();
  const Eigen::ArrayXd s_p = p.log_std.array().exp();
  const Eigen::ArrayXd d = (p.mean - q.mean).array();
  const Eigen::ArrayXd w = d * d + s_q;
  const double k = static_cast<double>(q.mean.size());
  return 0.5 * ((p.log_std.array() - q.log_std.array() + w / s_p).sum() - k);
}

}  // namespace ela::nn
