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

#include "ela/nn/tape.h"

#include <cmath>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {
namespace {

constexpr double kLogProbFloor = -27.631021115928547;  // log(1e-12)

// Below this many batch rows a coefficient-wise product beats GEMM packing.
constexpr Eigen::Index kThinBatch = 16;

// Gradient w.r.t. the right factor of x * w: x^T g.
void AccumulateRightGrad(Tape& tape, int w_id, const Matrix& x, const Matrix& g) {
  if (x.rows() <= kThinBatch) {
    // Sum of per-row outer products, each written along contiguous rows.
    Matrix* buf = tape.GradBuffer(w_id);
    if (buf == nullptr) return;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (Eigen::Index i = 0; i < x.cols(); ++i) {
        const double xi = x(r, i);
        if (xi != 0.0) buf->row(i) += xi * g.row(r);
      }
    }
  } else {
    tape.AccumulateExpr(w_id, x.transpose() * g);
  }
}

Tape& SameTape(Var a, Var b, std::string_view op) {
  if (a.tape == nullptr || a.tape != b.tape) {
    Fail(fmt::format("{}: operands recorded on different tapes", op));
  }
  return *a.tape;
}

void CheckSameShape(const Matrix& a, const Matrix& b, std::string_view op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    Fail(fmt::format("{}: shape mismatch {} vs {}", op, ShapeString(a),
                     ShapeString(b)));
  }
}

template <typename Forward, typename Derivative>
Var Elementwise(Var a, Forward f, Derivative df, std::string_view op) {
  Tape& t = *a.tape;
  Matrix out = a.value().unaryExpr(f);
  return t.Record(std::move(out), {a.id},
                  [a_id = a.id, df](Tape& tape, int self) {
                    const Matrix& x = tape.Value(a_id);
                    const Matrix& y = tape.Value(self);
                    tape.AccumulateExpr(
                        a_id, tape.GradRef(self).cwiseProduct(
                                  x.binaryExpr(y, df)));
                  },
                  op);
}

double StableSoftplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double StableSigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Matrix& Var::value() const {
  Check(tape != nullptr, "Var is not attached to a tape");
  return tape->Value(id);
}

const Matrix& Tape::Value(int id) const {
  const Node& n = nodes_[id];
  return n.param != nullptr ? n.param->value : n.owned;
}

Var Tape::Constant(Matrix value) {
  CheckFinite(value, "constant");
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Variable(Matrix value) {
  CheckFinite(value, "variable");
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::Param(Parameter& param) {
  auto it = param_nodes_.find(&param);
  if (it != param_nodes_.end()) return {this, it->second};
  Node n;
  n.param = &param;
  n.requires_grad = !params_frozen_;
  nodes_.push_back(std::move(n));
  const int id = static_cast<int>(nodes_.size()) - 1;
  param_nodes_[&param] = id;
  return {this, id};
}

Var Tape::Record(Matrix value, std::vector<int> inputs, BackwardFn backward,
                 std::string_view op) {
  CheckFinite(value, op);
  Node n;
  n.owned = std::move(value);
  for (int id : inputs) n.requires_grad = n.requires_grad || nodes_[id].requires_grad;
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Matrix Tape::Grad(Var v) const {
  const Node& n = nodes_[v.id];
  if (n.param != nullptr) return n.param->grad;
  if (n.has_grad) return n.grad;
  const Matrix& val = Value(v.id);
  return Matrix::Zero(val.rows(), val.cols());
}

void Tape::Accumulate(int id, const Matrix& g) { AccumulateExpr(id, g); }

Matrix* Tape::GradBuffer(int id) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return nullptr;
  const Matrix& v = Value(id);
  Matrix& buf = n.param != nullptr ? n.param->grad : n.grad;
  if (n.param == nullptr && !n.has_grad) {
    buf.setZero(v.rows(), v.cols());
    n.has_grad = true;
  } else if (buf.rows() != v.rows() || buf.cols() != v.cols()) {
    buf.setZero(v.rows(), v.cols());
  }
  return &buf;
}

void Tape::Backward(Var loss) {
  Check(loss.tape == this, "Backward: loss recorded on another tape");
  Check(!backward_done_, "Backward: tape already consumed");
  const Matrix& lv = Value(loss.id);
  if (lv.rows() != 1 || lv.cols() != 1) {
    Fail(fmt::format("Backward: loss must be 1x1, got {}", ShapeString(lv)));
  }
  backward_done_ = true;
  if (!nodes_[loss.id].requires_grad) return;
  if (nodes_[loss.id].param != nullptr) {
    AccumulateExpr(loss.id, Matrix::Ones(1, 1));
    return;
  }
  nodes_[loss.id].grad = Matrix::Ones(1, 1);
  nodes_[loss.id].has_grad = true;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.has_grad) continue;
    CheckFinite(n.grad, "backward");
    if (n.backward) n.backward(*this, id);
  }
}

Var MatMul(Var a, Var b) {
  Tape& t = SameTape(a, b, "MatMul");
  if (a.cols() != b.rows()) {
    Fail(fmt::format("MatMul: shape mismatch {} x {}", ShapeString(a.value()),
                     ShapeString(b.value())));
  }
  Matrix out = a.value() * b.value();
  return t.Record(std::move(out), {a.id, b.id},
                  [a_id = a.id, b_id = b.id](Tape& tape, int self) {
                    const Matrix& g = tape.GradRef(self);
                    if (tape.RequiresGrad(a_id)) {
                      tape.AccumulateExpr(a_id, g * tape.Value(b_id).transpose());
                    }
                    if (tape.RequiresGrad(b_id)) {
                      AccumulateRightGrad(tape, b_id, tape.Value(a_id), g);
                    }
                  },
                  "MatMul");
}

Var Affine(Var x, Var w, Var b) {
  Tape& t = SameTape(x, w, "Affine");
  SameTape(x, b, "Affine");
  if (x.cols() != w.rows() || b.rows() != 1 || b.cols() != w.cols()) {
    Fail(fmt::format("Affine: shape mismatch x{} w{} b{}", ShapeString(x.value()),
                     ShapeString(w.value()), ShapeString(b.value())));
  }
  Matrix out = x.value() * w.value();
  out.rowwise() += b.value().row(0);
  return t.Record(std::move(out), {x.id, w.id, b.id},
                  [x_id = x.id, w_id = w.id, b_id = b.id](Tape& tape, int self) {
                    const Matrix& g = tape.GradRef(self);
                    if (tape.RequiresGrad(x_id)) {
                      tape.AccumulateExpr(x_id, g * tape.Value(w_id).transpose());
                    }
                    if (tape.RequiresGrad(w_id)) {
                      AccumulateRightGrad(tape, w_id, tape.Value(x_id), g);
                    }
                    if (tape.RequiresGrad(b_id)) {
                      tape.AccumulateExpr(b_id, g.colwise().sum());
                    }
                  },
                  "Affine");
}

Var Add(Var a, Var b) {
  Tape& t = SameTape(a, b, "Add");
  CheckSameShape(a.value(), b.value(), "Add");
  return t.Record(a.value() + b.value(), {a.id, b.id},
                  [a_id = a.id, b_id = b.id](Tape& tape, int self) {
                    tape.AccumulateExpr(a_id, tape.GradRef(self));
                    tape.AccumulateExpr(b_id, tape.GradRef(self));
                  },
                  "Add");
}

Var Sub(Var a, Var b) {
  Tape& t = SameTape(a, b, "Sub");
  CheckSameShape(a.value(), b.value(), "Sub");
  return t.Record(a.value() - b.value(), {a.id, b.id},
                  [a_id = a.id, b_id = b.id](Tape& tape, int self) {
                    tape.AccumulateExpr(a_id, tape.GradRef(self));
                    tape.AccumulateExpr(b_id, -tape.GradRef(self));
                  },
                  "Sub");
}

Var Mul(Var a, Var b) {
  Tape& t = SameTape(a, b, "Mul");
  CheckSameShape(a.value(), b.value(), "Mul");
  return t.Record(a.value().cwiseProduct(b.value()), {a.id, b.id},
                  [a_id = a.id, b_id = b.id](Tape& tape, int self) {
                    const Matrix& g = tape.GradRef(self);
                    if (tape.RequiresGrad(a_id)) {
                      tape.AccumulateExpr(a_id, g.cwiseProduct(tape.Value(b_id)));
                    }
                    if (tape.RequiresGrad(b_id)) {
                      tape.AccumulateExpr(b_id, g.cwiseProduct(tape.Value(a_id)));
                    }
                  },
                  "Mul");
}

Var Scale(Var a, double c) {
  return a.tape->Record(a.value() * c, {a.id},
                        [a_id = a.id, c](Tape& tape, int self) {
                          tape.AccumulateExpr(a_id, tape.GradRef(self) * c);
                        },
                        "Scale");
}

Var Tanh(Var a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; }, "Tanh");
}

Var Sigmoid(Var a) {
  return Elementwise(
      a, [](double x) { return StableSigmoid(x); },
      [](double, double y) { return y * (1.0 - y); }, "Sigmoid");
}

Var Relu(Var a) {
  return Elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; }, "Relu");
}

Var Exp(Var a) {
  return Elementwise(
      a, [](double x) { return std::exp(x); },
      [](double, double y) { return y; }, "Exp");
}

Var Softplus(Var a) {
  return Elementwise(
      a, [](double x) { return StableSoftplus(x); },
      [](double x, double) { return StableSigmoid(x); }, "Softplus");
}

Var ConcatCols(std::span<const Var> parts) {
  Check(!parts.empty(), "ConcatCols: no inputs");
  Tape& t = *parts.front().tape;
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  for (const Var& p : parts) {
    SameTape(parts.front(), p, "ConcatCols");
    if (p.rows() != rows) {
      Fail(fmt::format("ConcatCols: row mismatch {} vs {}", p.rows(), rows));
    }
    cols += p.cols();
    ids.push_back(p.id);
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return t.Record(std::move(out), ids,
                  [ids](Tape& tape, int self) {
                    const Matrix& g = tape.GradRef(self);
                    Eigen::Index off = 0;
                    for (int id : ids) {
                      const Eigen::Index c = tape.Value(id).cols();
                      if (tape.RequiresGrad(id)) {
                        tape.AccumulateExpr(id, g.middleCols(off, c));
                      }
                      off += c;
                    }
                  },
                  "ConcatCols");
}

Var SliceCols(Var a, Eigen::Index start, Eigen::Index width) {
  if (start < 0 || width < 0 || start + width > a.cols()) {
    Fail(fmt::format("SliceCols: [{}, {}) out of range for {}", start,
                     start + width, ShapeString(a.value())));
  }
  Matrix out = a.value().middleCols(start, width);
  return a.tape->Record(
      std::move(out), {a.id},
      [a_id = a.id, start, width](Tape& tape, int self) {
        const Matrix& x = tape.Value(a_id);
        Matrix g = Matrix::Zero(x.rows(), x.cols());
        g.middleCols(start, width) = tape.GradRef(self);
        tape.Accumulate(a_id, g);
      },
      "SliceCols");
}

Var Sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return a.tape->Record(std::move(out), {a.id},
                        [a_id = a.id](Tape& tape, int self) {
                          const Matrix& x = tape.Value(a_id);
                          tape.AccumulateExpr(
                              a_id, Matrix::Constant(x.rows(), x.cols(),
                                                     tape.GradRef(self)(0, 0)));
                        },
                        "Sum");
}

Var ScaleRows(Var a, const Matrix& weights) {
  if (weights.rows() != a.rows() || weights.cols() != 1) {
    Fail(fmt::format("ScaleRows: weights {} do not match {}",
                     ShapeString(weights), ShapeString(a.value())));
  }
  Matrix out = a.value().array().colwise() * weights.col(0).array();
  return a.tape->Record(std::move(out), {a.id},
                        [a_id = a.id, weights](Tape& tape, int self) {
                          Matrix g = tape.GradRef(self).array().colwise() *
                                     weights.col(0).array();
                          tape.Accumulate(a_id, g);
                        },
                        "ScaleRows");
}

Var SoftmaxCrossEntropy(Var logits, const Matrix& targets) {
  const Matrix& z = logits.value();
  CheckSameShape(z, targets, "SoftmaxCrossEntropy");
  if ((targets.array() < 0.0).any()) {
    Fail("SoftmaxCrossEntropy: negative target weight");
  }
  Matrix log_probs = z;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double m = z.row(i).maxCoeff();
    const double lse = m + std::log((z.row(i).array() - m).exp().sum());
    log_probs.row(i).array() -= lse;
  }
  Matrix loss(z.rows(), 1);
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double l = 0.0;
    for (Eigen::Index a = 0; a < z.cols(); ++a) {
      if (targets(i, a) != 0.0) {
        l -= targets(i, a) * std::max(log_probs(i, a), kLogProbFloor);
      }
    }
    loss(i, 0) = l;
  }
  return logits.tape->Record(
      std::move(loss), {logits.id},
      [z_id = logits.id, targets, log_probs](Tape& tape, int self) {
        const Matrix& g = tape.GradRef(self);
        Matrix dz(log_probs.rows(), log_probs.cols());
        for (Eigen::Index i = 0; i < dz.rows(); ++i) {
          // Only unclamped terms contribute gradient.
          double active_mass = 0.0;
          for (Eigen::Index a = 0; a < dz.cols(); ++a) {
            if (targets(i, a) != 0.0 && log_probs(i, a) > kLogProbFloor) {
              active_mass += targets(i, a);
            }
          }
          for (Eigen::Index a = 0; a < dz.cols(); ++a) {
            const double p = std::exp(log_probs(i, a));
            const double t =
                log_probs(i, a) > kLogProbFloor ? targets(i, a) : 0.0;
            dz(i, a) = g(i, 0) * (p * active_mass - t);
          }
        }
        tape.Accumulate(z_id, dz);
      },
      "SoftmaxCrossEntropy");
}

Var KlDiagGaussian(Var mu_q, Var log_std_q, Var mu_p, Var log_std_p) {
  Tape& t = SameTape(mu_q, log_std_q, "KlDiagGaussian");
  SameTape(mu_q, mu_p, "KlDiagGaussian");
  SameTape(mu_q, log_std_p, "KlDiagGaussian");
  CheckSameShape(mu_q.value(), log_std_q.value(), "KlDiagGaussian");
  CheckSameShape(mu_q.value(), mu_p.value(), "KlDiagGaussian");
  CheckSameShape(mu_q.value(), log_std_p.value(), "KlDiagGaussian");
  const auto d = (mu_q.value() - mu_p.value()).array();
  const auto var_q = (2.0 * log_std_q.value().array()).exp();
  const auto inv_var_p = (-2.0 * log_std_p.value().array()).exp();
  const Matrix terms = (log_std_p.value().array() - log_std_q.value().array() +
                        0.5 * (var_q + d * d) * inv_var_p - 0.5)
                           .matrix();
  Matrix out = terms.rowwise().sum();
  return t.Record(
      std::move(out), {mu_q.id, log_std_q.id, mu_p.id, log_std_p.id},
      [mq = mu_q.id, lq = log_std_q.id, mp = mu_p.id, lp = log_std_p.id](
          Tape& tape, int self) {
        const Matrix& g = tape.GradRef(self);  // B x 1
        const Eigen::ArrayXXd diff =
            (tape.Value(mq) - tape.Value(mp)).array();
        const Eigen::ArrayXXd vq = (2.0 * tape.Value(lq).array()).exp();
        const Eigen::ArrayXXd ivp = (-2.0 * tape.Value(lp).array()).exp();
        const Eigen::ArrayXXd gb =
            g.col(0).array().replicate(1, diff.cols());
        if (tape.RequiresGrad(mq)) tape.Accumulate(mq, (gb * diff * ivp).matrix());
        if (tape.RequiresGrad(mp)) tape.Accumulate(mp, (-gb * diff * ivp).matrix());
        if (tape.RequiresGrad(lq)) {
          tape.Accumulate(lq, (gb * (vq * ivp - 1.0)).matrix());
        }
        if (tape.RequiresGrad(lp)) {
          tape.Accumulate(lp, (gb * (1.0 - (vq + diff * diff) * ivp)).matrix());
        }
      },
      "KlDiagGaussian");
}

Var Reparameterize(Var mu, Var log_std, const Matrix& noise) {
  Tape& t = SameTape(mu, log_std, "Reparameterize");
  CheckSameShape(mu.value(), log_std.value(), "Reparameterize");
  CheckSameShape(mu.value(), noise, "Reparameterize");
  Matrix out =
      mu.value() + (log_std.value().array().exp() * noise.array()).matrix();
  return t.Record(std::move(out), {mu.id, log_std.id},
                  [m = mu.id, l = log_std.id, noise](Tape& tape, int self) {
                    const Matrix& g = tape.GradRef(self);
                    tape.AccumulateExpr(m, g);
                    if (tape.RequiresGrad(l)) {
                      tape.Accumulate(
                          l, (g.array() * tape.Value(l).array().exp() *
                              noise.array())
                                 .matrix());
                    }
                  },
                  "Reparameterize");
}

}  // namespace ela::nn
