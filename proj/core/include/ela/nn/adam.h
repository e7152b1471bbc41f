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

#ifndef ELA_NN_ADAM_H_
#define ELA_NN_ADAM_H_

#include <cstdint>

#include "ela/nn/params.h"

namespace ela::nn {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// One bias-corrected Adam update of `value` in place. `t` is the 1-based
// update count for these moments.
void AdamApply(const AdamConfig& cfg, std::int64_t t, Eigen::Ref<Matrix> value,
               const Eigen::Ref<const Matrix>& grad, Eigen::Ref<Matrix> m,
               Eigen::Ref<Matrix> v);

// Advances the store's step counter and updates every parameter from its
// gradient. Throws if any gradient buffer is missing or mis-shaped.
void AdamStep(ParamStore& store, const AdamConfig& cfg);

}  // namespace ela::nn

#endif  // ELA_NN_ADAM_H_
