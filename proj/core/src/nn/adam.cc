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

#include "ela/nn/adam.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {

void AdamApply(const AdamConfig& cfg, std::int64_t t, Eigen::Ref<Matrix> value,
               const Eigen::Ref<const Matrix>& grad, Eigen::Ref<Matrix> m,
               Eigen::Ref<Matrix> v) {
  Check(t >= 1, "AdamApply: step must be >= 1");
  Check(grad.rows() == value.rows() && grad.cols() == value.cols() &&
            m.rows() == value.rows() && m.cols() == value.cols() &&
            v.rows() == value.rows() && v.cols() == value.cols(),
        "AdamApply: buffer shapes differ");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  value.array() -= (cfg.lr / c1) * m.array() /
                   ((v.array() * (1.0 / c2)).sqrt() + cfg.eps);
  CheckFinite(value, "Adam update");
}

void AdamStep(ParamStore& store, const AdamConfig& cfg) {
  for (const auto& p : store.params()) {
    if (p->grad.rows() != p->value.rows() || p->grad.cols() != p->value.cols()) {
      Fail(fmt::format("Adam: missing gradient for parameter '{}'", p->name));
    }
  }
  store.set_step(store.step() + 1);
  for (const auto& p : store.params()) {
    AdamApply(cfg, store.step(), p->value, p->grad, p->m, p->v);
  }
}

}  // namespace ela::nn
