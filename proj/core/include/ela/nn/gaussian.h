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

#ifndef ELA_NN_GAUSSIAN_H_
#define ELA_NN_GAUSSIAN_H_

#include <Eigen/Dense>

namespace ela::nn {

// Diagonal Gaussian parameterized by mean and log standard deviation.
struct DiagGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;
};

// KL(q || p) for diagonal Gaussians, summed over dimensions.
double KlDiagGaussianValue(const DiagGaussian& q, const DiagGaussian& p);

// The regularizer exactly as sometimes written in VRNN derivations:
//   0.5 * [sum_i (log s_p - log s_q + w_i / s_p) - k],
//   w_i = (mu_p - mu_q)^2 + s_q,
// with s the standard deviation. It differs from the true KL unless s is read
// as a variance; kept only for comparison against KlDiagGaussianValue.
double LiteralRegularizerValue(const DiagGaussian& q, const DiagGaussian& p);

}  // namespace ela::nn

#endif  // ELA_NN_GAUSSIAN_H_
