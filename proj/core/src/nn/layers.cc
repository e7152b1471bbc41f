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

#include "ela/nn/layers.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {
namespace {

Matrix InitMatrix(int rows, int cols, int fan_in, Init init, Rng& rng) {
  if (init == Init::kZero) return Matrix::Zero(rows, cols);
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = (2.0 * rng.Uniform() - 1.0) * bound;
  }
  return m;
}

}  // namespace

Var Activate(Var x, Activation act) {
  switch (act) {
    case Activation::kIdentity:
      return x;
    case Activation::kRelu:
      return Relu(x);
    case Activation::kTanh:
      return Tanh(x);
  }
  Fail("unknown activation");
}

Linear::Linear(ParamStore& store, const std::string& name, int in, int out,
               Rng& rng, Init init)
    : in_(in), out_(out) {
  Check(in > 0 && out > 0, fmt::format("Linear '{}': widths must be positive", name));
  w_ = &store.Add(name + ".w", InitMatrix(in, out, in, init, rng));
  b_ = &store.Add(name + ".b", InitMatrix(1, out, in, init, rng));
}

Var Linear::Forward(Tape& tape, Var x) const {
  return Affine(x, tape.Param(*w_), tape.Param(*b_));
}

Mlp::Mlp(ParamStore& store, const std::string& name, std::vector<int> widths,
         Activation hidden, Activation output, Rng& rng, Init last_layer_init)
    : widths_(std::move(widths)), hidden_(hidden), output_(output) {
  Check(widths_.size() >= 2, fmt::format("Mlp '{}': need at least 2 widths", name));
  for (std::size_t i = 0; i + 1 < widths_.size(); ++i) {
    const bool last = i + 2 == widths_.size();
    layers_.emplace_back(store, fmt::format("{}.{}", name, i), widths_[i],
                         widths_[i + 1], rng,
                         last ? last_layer_init : Init::kUniform);
  }
}

Var Mlp::Forward(Tape& tape, Var x) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (x.cols() != layers_[i].in()) {
      Fail(fmt::format("Mlp layer {}: expected input width {}, got {}", i,
                       layers_[i].in(), x.cols()));
    }
    x = layers_[i].Forward(tape, x);
    x = Activate(x, i + 1 == layers_.size() ? output_ : hidden_);
  }
  return x;
}

Gru::Gru(ParamStore& store, const std::string& name, int in, int hidden,
         Rng& rng)
    : in_(in), hidden_(hidden) {
  Check(in > 0 && hidden > 0, fmt::format("Gru '{}': widths must be positive", name));
  wx_ = &store.Add(name + ".wx", InitMatrix(in, 3 * hidden, hidden, Init::kUniform, rng));
  bx_ = &store.Add(name + ".bx", InitMatrix(1, 3 * hidden, hidden, Init::kUniform, rng));
  wh_ = &store.Add(name + ".wh", InitMatrix(hidden, 3 * hidden, hidden, Init::kUniform, rng));
  bh_ = &store.Add(name + ".bh", InitMatrix(1, 3 * hidden, hidden, Init::kUniform, rng));
}

Var Gru::Step(Tape& tape, Var h_prev, Var x) const {
  if (x.cols() != in_ || h_prev.cols() != hidden_ || x.rows() != h_prev.rows()) {
    Fail(fmt::format("Gru step: expected x [Bx{}] and h [Bx{}], got {} and {}",
                     in_, hidden_, ShapeString(x.value()),
                     ShapeString(h_prev.value())));
  }
  const Var gx = Affine(x, tape.Param(*wx_), tape.Param(*bx_));
  const Var gh = Affine(h_prev, tape.Param(*wh_), tape.Param(*bh_));
  const int H = hidden_;
  const Var r = Sigmoid(Add(SliceCols(gx, 0, H), SliceCols(gh, 0, H)));
  const Var z = Sigmoid(Add(SliceCols(gx, H, H), SliceCols(gh, H, H)));
  const Var n = Tanh(Add(SliceCols(gx, 2 * H, H), Mul(r, SliceCols(gh, 2 * H, H))));
  return Add(n, Mul(z, Sub(h_prev, n)));
}

}  // namespace ela::nn
