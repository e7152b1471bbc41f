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

#include "grad_suite.h"

#include <cmath>
#include <functional>

#include "ela/nn/layers.h"
#include "ela/pvrnn/pvrnn.h"

namespace ela::testing {
namespace {

using nn::Matrix;
using nn::Tape;
using nn::Var;

int Between(Rng& rng, int lo, int hi) { return lo + rng.UniformInt(hi - lo + 1); }

// Keeps values away from the ReLU kink so a finite-difference step never
// straddles it.
Matrix AwayFromZero(Matrix m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    double& x = m.data()[i];
    if (std::abs(x) < 0.05) x = x < 0 ? x - 0.05 : x + 0.05;
  }
  return m;
}

using CaseFn = std::function<GradCheckReport(Rng&)>;

struct Case {
  std::string name;
  CaseFn run;
};

std::vector<Case> Cases() {
  std::vector<Case> cases;
  const auto unary = [&](std::string name, Var (*op)(Var), double scale, bool kink) {
    cases.push_back({name, [=](Rng& rng) {
                       Matrix x = RandomMatrix(Between(rng, 1, 4), Between(rng, 1, 5), rng,
                                               scale);
                       if (kink) x = AwayFromZero(std::move(x));
                       return CheckLeafGradients(
                           [op](Tape&, std::span<const Var> v) { return op(v[0]); }, {x},
                           rng);
                     }});
  };
  unary("Tanh", nn::Tanh, 1.5, false);
  unary("Sigmoid", nn::Sigmoid, 2.0, false);
  unary("Relu", nn::Relu, 1.0, true);
  unary("Exp", nn::Exp, 0.7, false);
  unary("Softplus", nn::Softplus, 2.0, false);
  unary("Sum", nn::Sum, 1.0, false);

  const auto binary = [&](std::string name, Var (*op)(Var, Var)) {
    cases.push_back({name, [=](Rng& rng) {
                       const int r = Between(rng, 1, 4);
                       const int c = Between(rng, 1, 5);
                       return CheckLeafGradients(
                           [op](Tape&, std::span<const Var> v) { return op(v[0], v[1]); },
                           {RandomMatrix(r, c, rng), RandomMatrix(r, c, rng)}, rng);
                     }});
  };
  binary("Add", nn::Add);
  binary("Sub", nn::Sub);
  binary("Mul", nn::Mul);

  cases.push_back({"MatMul", [](Rng& rng) {
                     // Row counts above 16 take the dense weight-gradient path.
                     const int n = rng.Uniform() < 0.5 ? Between(rng, 1, 4) : Between(rng, 17, 20);
                     const int k = Between(rng, 1, 5);
                     const int m = Between(rng, 1, 4);
                     return CheckLeafGradients(
                         [](Tape&, std::span<const Var> v) { return nn::MatMul(v[0], v[1]); },
                         {RandomMatrix(n, k, rng), RandomMatrix(k, m, rng)}, rng);
                   }});
  cases.push_back({"Affine", [](Rng& rng) {
                     const int n = rng.Uniform() < 0.5 ? Between(rng, 1, 4) : Between(rng, 17, 20);
                     const int k = Between(rng, 1, 5);
                     const int m = Between(rng, 1, 4);
                     return CheckLeafGradients(
                         [](Tape&, std::span<const Var> v) {
                           return nn::Affine(v[0], v[1], v[2]);
                         },
                         {RandomMatrix(n, k, rng), RandomMatrix(k, m, rng),
                          RandomMatrix(1, m, rng)},
                         rng);
                   }});
  cases.push_back({"Scale", [](Rng& rng) {
                     const double c = 3.0 * rng.Normal();
                     return CheckLeafGradients(
                         [c](Tape&, std::span<const Var> v) { return nn::Scale(v[0], c); },
                         {RandomMatrix(Between(rng, 1, 4), Between(rng, 1, 5), rng)}, rng);
                   }});
  cases.push_back({"ConcatCols", [](Rng& rng) {
                     const int r = Between(rng, 1, 4);
                     std::vector<Matrix> parts;
                     const int n = Between(rng, 1, 3);
                     for (int i = 0; i < n; ++i) {
                       parts.push_back(RandomMatrix(r, Between(rng, 1, 4), rng));
                     }
                     return CheckLeafGradients(
                         [](Tape&, std::span<const Var> v) { return nn::ConcatCols(v); },
                         parts, rng);
                   }});
  cases.push_back({"SliceCols", [](Rng& rng) {
                     const int c = Between(rng, 1, 6);
                     const int start = rng.UniformInt(c);
                     const int width = Between(rng, 1, c - start);
                     return CheckLeafGradients(
                         [=](Tape&, std::span<const Var> v) {
                           return nn::SliceCols(v[0], start, width);
                         },
                         {RandomMatrix(Between(rng, 1, 4), c, rng)}, rng);
                   }});
  cases.push_back({"ScaleRows", [](Rng& rng) {
                     const int r = Between(rng, 1, 4);
                     const Matrix w = RandomMatrix(r, 1, rng);
                     return CheckLeafGradients(
                         [w](Tape&, std::span<const Var> v) { return nn::ScaleRows(v[0], w); },
                         {RandomMatrix(r, Between(rng, 1, 5), rng)}, rng);
                   }});
  cases.push_back({"SoftmaxCrossEntropy", [](Rng& rng) {
                     const int r = Between(rng, 1, 4);
                     const int c = Between(rng, 2, 5);
                     Matrix targets = Matrix::Zero(r, c);
                     for (Eigen::Index i = 0; i < targets.size(); ++i) {
                       if (rng.Uniform() < 0.6) targets.data()[i] = 3.0 * rng.Uniform();
                     }
                     return CheckLeafGradients(
                         [targets](Tape&, std::span<const Var> v) {
                           return nn::SoftmaxCrossEntropy(v[0], targets);
                         },
                         {RandomMatrix(r, c, rng, 2.0)}, rng);
                   }});
  cases.push_back({"KlDiagGaussian", [](Rng& rng) {
                     const int r = Between(rng, 1, 4);
                     const int c = Between(rng, 1, 5);
                     return CheckLeafGradients(
                         [](Tape&, std::span<const Var> v) {
                           return nn::KlDiagGaussian(v[0], v[1], v[2], v[3]);
                         },
                         {RandomMatrix(r, c, rng), RandomMatrix(r, c, rng, 0.5),
                          RandomMatrix(r, c, rng), RandomMatrix(r, c, rng, 0.5)},
                         rng);
                   }});
  cases.push_back({"Reparameterize", [](Rng& rng) {
                     const int r = Between(rng, 1, 4);
                     const int c = Between(rng, 1, 5);
                     const Matrix noise = RandomMatrix(r, c, rng);
                     return CheckLeafGradients(
                         [noise](Tape&, std::span<const Var> v) {
                           return nn::Reparameterize(v[0], v[1], noise);
                         },
                         {RandomMatrix(r, c, rng), RandomMatrix(r, c, rng, 0.5)}, rng);
                   }});

  // Layers: parameters and inputs both checked.
  cases.push_back({"Linear", [](Rng& rng) {
                     nn::ParamStore store;
                     const int in = Between(rng, 1, 5);
                     const int out = Between(rng, 1, 4);
                     nn::Linear layer(store, "lin", in, out, rng);
                     const Matrix x = RandomMatrix(Between(rng, 1, 4), in, rng);
                     const Matrix w = RandomMatrix(x.rows(), out, rng);
                     GradCheckReport r = CheckParamGradients(
                         [&](Tape& t) {
                           return nn::Sum(nn::Mul(layer.Forward(t, t.Constant(x)),
                                                  t.Constant(w)));
                         },
                         store);
                     r.Merge(CheckLeafGradients(
                         [&](Tape& t, std::span<const Var> v) { return layer.Forward(t, v[0]); },
                         {x}, rng));
                     return r;
                   }});
  cases.push_back({"Mlp", [](Rng& rng) {
                     nn::ParamStore store;
                     std::vector<int> widths;
                     const int depth = Between(rng, 1, 3);
                     for (int i = 0; i <= depth; ++i) widths.push_back(Between(rng, 1, 5));
                     const auto hidden =
                         rng.Uniform() < 0.5 ? nn::Activation::kTanh : nn::Activation::kRelu;
                     nn::Mlp mlp(store, "mlp", widths, hidden, nn::Activation::kIdentity, rng);
                     const Matrix x = RandomMatrix(Between(rng, 1, 4), widths.front(), rng);
                     const Matrix w = RandomMatrix(x.rows(), widths.back(), rng);
                     GradCheckReport r = CheckParamGradients(
                         [&](Tape& t) {
                           return nn::Sum(nn::Mul(mlp.Forward(t, t.Constant(x)), t.Constant(w)));
                         },
                         store);
                     r.Merge(CheckLeafGradients(
                         [&](Tape& t, std::span<const Var> v) { return mlp.Forward(t, v[0]); },
                         {x}, rng));
                     return r;
                   }});
  cases.push_back({"Gru", [](Rng& rng) {
                     nn::ParamStore store;
                     const int in = Between(rng, 1, 4);
                     const int hidden = Between(rng, 1, 4);
                     nn::Gru gru(store, "gru", in, hidden, rng);
                     const int rows = Between(rng, 1, 3);
                     const int steps = Between(rng, 1, 3);
                     std::vector<Matrix> xs;
                     for (int s = 0; s < steps; ++s) xs.push_back(RandomMatrix(rows, in, rng));
                     const Matrix h0 = RandomMatrix(rows, hidden, rng, 0.5);
                     const Matrix w = RandomMatrix(rows, hidden, rng);
                     GradCheckReport r = CheckParamGradients(
                         [&](Tape& t) {
                           Var h = t.Constant(h0);
                           for (const auto& x : xs) h = gru.Step(t, h, t.Constant(x));
                           return nn::Sum(nn::Mul(h, t.Constant(w)));
                         },
                         store);
                     std::vector<Matrix> leaves = xs;
                     leaves.push_back(h0);
                     r.Merge(CheckLeafGradients(
                         [&](Tape& t, std::span<const Var> v) {
                           Var h = v.back();
                           for (std::size_t s = 0; s + 1 < v.size(); ++s) {
                             h = gru.Step(t, h, v[s]);
                           }
                           return h;
                         },
                         leaves, rng));
                     return r;
                   }});
  return cases;
}

}  // namespace

std::vector<NamedReport> NnGradientSuite(int configs, std::uint64_t seed) {
  std::vector<NamedReport> out;
  for (const Case& c : Cases()) {
    NamedReport named{c.name, configs, {}};
    Rng rng(DeriveSeed(seed, c.name));
    for (int i = 0; i < configs; ++i) named.report.Merge(c.run(rng));
    out.push_back(std::move(named));
  }
  return out;
}

NamedReport PvrnnTrajectoryGradient(int configs, std::uint64_t seed) {
  NamedReport named{"PvrnnTrajectoryLoss", configs, {}};
  Rng rng(DeriveSeed(seed, "pvrnn"));
  for (int c = 0; c < configs; ++c) {
    pvrnn::PvrnnHyper hyper;
    hyper.z_dim = Between(rng, 1, 4);
    hyper.h_dim = Between(rng, 1, 4);
    hyper.r_dim = Between(rng, 1, 4);
    hyper.l_dim = Between(rng, 1, 4);
    const int obs_width = Between(rng, 1, 4);
    const int actions = Between(rng, 2, 3);
    pvrnn::PvrnnModel model(obs_width, actions, hyper, rng.engine()());
    pvrnn::Sequence seq;
    seq.obs = RandomMatrix(3, obs_width, rng);
    for (int t = 0; t < 3; ++t) seq.actions.push_back(rng.UniformInt(actions));
    const Matrix l = RandomMatrix(1, hyper.l_dim, rng, 0.5);
    const std::uint64_t noise_seed = rng.engine()();
    const pvrnn::Sequence* batch[] = {&seq};
    // The same noise stream on every evaluation makes the loss a
    // deterministic function of parameters and representation.
    const auto loss = [&](Tape& t, Var lv) {
      Rng noise(noise_seed);
      return model.BatchLoss(t, batch, lv, std::span<Rng>(&noise, 1)).total;
    };
    named.report.Merge(CheckParamGradients(
        [&](Tape& t) { return loss(t, t.Constant(l)); }, model.store()));
    named.report.Merge(CheckLeafGradients(
        [&](Tape& t, std::span<const Var> v) { return loss(t, v[0]); }, {l}, rng));
  }
  return named;
}

}  // namespace ela::testing
