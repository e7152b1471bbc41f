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

#include "ela/nn/params.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {

std::string ShapeString(const Eigen::Ref<const Matrix>& m) {
  return fmt::format("[{}x{}]", m.rows(), m.cols());
}

void CheckFinite(const Eigen::Ref<const Matrix>& m, std::string_view op) {
  // A finite sum implies finite entries; only an overflowing sum needs the
  // element-wise scan.
  if (std::isfinite(m.sum())) return;
  if (!m.allFinite()) {
    throw NumericError(fmt::format("non-finite value produced by {} {}", op,
                                   ShapeString(m)));
  }
}

Parameter& ParamStore::Add(const std::string& name, Matrix init) {
  if (index_.contains(name)) Fail(fmt::format("duplicate parameter '{}'", name));
  CheckFinite(init, "parameter init");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = std::move(init);
  p->grad = Matrix::Zero(p->value.rows(), p->value.cols());
  p->m = Matrix::Zero(p->value.rows(), p->value.cols());
  p->v = Matrix::Zero(p->value.rows(), p->value.cols());
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) Fail(fmt::format("unknown parameter '{}'", name));
  return *params_[it->second];
}

const Parameter& ParamStore::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) Fail(fmt::format("unknown parameter '{}'", name));
  return *params_[it->second];
}

void ParamStore::ZeroGrad() {
  for (auto& p : params_) p->grad.setZero(p->value.rows(), p->value.cols());
}

std::int64_t ParamStore::NumScalars() const {
  std::int64_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParamStore::CopyValuesFrom(const ParamStore& other) {
  Check(other.params_.size() == params_.size(),
        "CopyValuesFrom: parameter count differs");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Parameter& src = *other.params_[i];
    Parameter& dst = *params_[i];
    if (src.name != dst.name || src.value.rows() != dst.value.rows() ||
        src.value.cols() != dst.value.cols()) {
      Fail(fmt::format("CopyValuesFrom: '{}' {} vs '{}' {}", dst.name,
                       ShapeString(dst.value), src.name, ShapeString(src.value)));
    }
    dst.value = src.value;
  }
}

}  // namespace ela::nn
