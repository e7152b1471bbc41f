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

#ifndef ELA_NN_TAPE_H_
#define ELA_NN_TAPE_H_

#include <deque>
#include <functional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ela/nn/params.h"
#include "ela/nn/tensor.h"

namespace ela::nn {

class Tape;

// Handle to a node recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

// Reverse-mode autodiff tape. Nodes are appended in evaluation order, so the
// recording is already topologically sorted and Backward walks it in reverse.
// A tape is single-use: record one forward pass, call Backward once.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf without gradient.
  Var Constant(Matrix value);
  // Leaf whose gradient is kept and readable through Grad() after Backward.
  Var Variable(Matrix value);
  // Leaf bound to a store parameter. Repeated calls for the same parameter
  // return the same node; Backward adds its gradient into param.grad.
  // On a tape with frozen parameters the node is a constant instead.
  Var Param(Parameter& param);

  // Must be set before any Param() call.
  void set_params_frozen(bool frozen) { params_frozen_ = frozen; }

  using BackwardFn = std::function<void(Tape&, int self)>;
  // Records a computed node. `backward` reads Grad(self) and accumulates into
  // its inputs with Accumulate().
  Var Record(Matrix value, std::vector<int> inputs, BackwardFn backward,
             std::string_view op);

  const Matrix& Value(int id) const;
  bool RequiresGrad(int id) const { return nodes_[id].requires_grad; }
  // Gradient of the most recent Backward target w.r.t. node `id`; zeros if
  // the node did not influence it. For parameter nodes this is the
  // parameter's accumulated gradient buffer.
  Matrix Grad(Var v) const;
  const Matrix& GradRef(int id) const { return nodes_[id].grad; }
  void Accumulate(int id, const Matrix& g);
  // Buffer that gradients for `id` accumulate into, zero-initialized on first
  // use; nullptr when the node does not require a gradient.
  Matrix* GradBuffer(int id);
  template <typename Expr>
  void AccumulateExpr(int id, const Expr& g);

  // loss must be 1x1.
  void Backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix owned;
    Parameter* param = nullptr;
    Matrix grad;
    std::vector<int> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    bool has_grad = false;
  };
  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, int> param_nodes_;
  bool backward_done_ = false;
  bool params_frozen_ = false;
};

template <typename Expr>
void Tape::AccumulateExpr(int id, const Expr& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.param != nullptr) {
    // Parameter gradients go straight into the store.
    Matrix& pg = n.param->grad;
    if (pg.rows() != n.param->value.rows() || pg.cols() != n.param->value.cols()) {
      pg.setZero(n.param->value.rows(), n.param->value.cols());
    }
    pg += g;
    return;
  }
  if (!n.has_grad) {
    n.grad = g;
    n.has_grad = true;
  } else {
    n.grad += g;
  }
}

// ---------------------------------------------------------------------------
// Differentiable operations. All inputs must live on the same tape.

Var MatMul(Var a, Var b);
// x * w + b, with b a 1 x out row broadcast over the batch.
Var Affine(Var x, Var w, Var b);
Var Add(Var a, Var b);
Var Sub(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double c);
Var Tanh(Var a);
Var Sigmoid(Var a);
Var Relu(Var a);
Var Exp(Var a);
Var Softplus(Var a);
Var ConcatCols(std::span<const Var> parts);
Var SliceCols(Var a, Eigen::Index start, Eigen::Index width);
// Sum of all entries, as a 1x1 node.
Var Sum(Var a);
// Scales row i of a by weights(i); weights is a constant column (e.g. a mask).
Var ScaleRows(Var a, const Matrix& weights);

// Per-row cross entropy -sum_a t(i,a) * log softmax(logits)(i,a), with
// probabilities floored at 1e-12. Targets are non-negative weights (one-hot
// rows or action counts). Returns a B x 1 column.
Var SoftmaxCrossEntropy(Var logits, const Matrix& targets);

// Per-row KL(N(mu_q, exp(ls_q)^2) || N(mu_p, exp(ls_p)^2)) summed over
// dimensions, as a B x 1 column.
Var KlDiagGaussian(Var mu_q, Var log_std_q, Var mu_p, Var log_std_p);

// mu + exp(log_std) * noise, with `noise` a constant standard-normal draw.
Var Reparameterize(Var mu, Var log_std, const Matrix& noise);

}  // namespace ela::nn

#endif  // ELA_NN_TAPE_H_
