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

#ifndef ELA_NN_LAYERS_H_
#define ELA_NN_LAYERS_H_

#include <string>
#include <vector>

#include "ela/common/rng.h"
#include "ela/nn/params.h"
#include "ela/nn/tape.h"

namespace ela::nn {

enum class Activation { kIdentity, kRelu, kTanh };

enum class Init {
  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  kUniform,
  kZero,
};

Var Activate(Var x, Activation act);

// y = x W + b with W stored as in x out.
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in, int out, Rng& rng,
         Init init = Init::kUniform);

  Var Forward(Tape& tape, Var x) const;

  int in() const { return in_; }
  int out() const { return out_; }
  Parameter& weight() const { return *w_; }
  Parameter& bias() const { return *b_; }

 private:
  Parameter* w_ = nullptr;
  Parameter* b_ = nullptr;
  int in_ = 0;
  int out_ = 0;
};

// Stack of Linear layers. `widths` lists input width, hidden widths, output
// width. Hidden layers use `hidden`, the last layer uses `output`.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& name, std::vector<int> widths,
      Activation hidden, Activation output, Rng& rng,
      Init last_layer_init = Init::kUniform);

  Var Forward(Tape& tape, Var x) const;

  int in() const { return widths_.front(); }
  int out() const { return widths_.back(); }
  const std::vector<Linear>& layers() const { return layers_; }

 private:
  std::vector<int> widths_;
  std::vector<Linear> layers_;
  Activation hidden_ = Activation::kRelu;
  Activation output_ = Activation::kIdentity;
};

// Gated recurrent unit with the usual reset/update/candidate gates:
//   r = sigmoid(x W_ir + b_ir + h W_hr + b_hr)
//   z = sigmoid(x W_iz + b_iz + h W_hz + b_hz)
//   n = tanh(x W_in + b_in + r * (h W_hn + b_hn))
//   h' = (1 - z) * n + z * h
// Gate blocks are packed column-wise in the order r, z, n.
class Gru {
 public:
  Gru() = default;
  Gru(ParamStore& store, const std::string& name, int in, int hidden, Rng& rng);

  Var Step(Tape& tape, Var h_prev, Var x) const;

  int in() const { return in_; }
  int hidden() const { return hidden_; }
  Parameter& w_input() const { return *wx_; }
  Parameter& b_input() const { return *bx_; }
  Parameter& w_hidden() const { return *wh_; }
  Parameter& b_hidden() const { return *bh_; }

 private:
  Parameter* wx_ = nullptr;
  Parameter* bx_ = nullptr;
  Parameter* wh_ = nullptr;
  Parameter* bh_ = nullptr;
  int in_ = 0;
  int hidden_ = 0;
};

}  // namespace ela::nn

#endif  // ELA_NN_LAYERS_H_
