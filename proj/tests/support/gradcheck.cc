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

#include "gradcheck.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ela::testing {
namespace {

void Compare(double analytic, double numeric, const std::string& where,
             const GradCheckOptions& opt, GradCheckReport& report) {
  ++report.checked;
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale > 0.0) {
    report.worst_rel_error = std::max(
        report.worst_rel_error, diff / std::max(scale, opt.abs_floor / opt.rel_tol));
  }
  if (!(diff <= opt.rel_tol * scale + opt.abs_floor)) {
    if (report.failures == 0) {
      report.first_failure = fmt::format("{}: analytic {:.10g} numeric {:.10g}", where,
                                         analytic, numeric);
    }
    ++report.failures;
  }
}

}  // namespace

void GradCheckReport::Merge(const GradCheckReport& other) {
  if (failures == 0 && other.failures > 0) first_failure = other.first_failure;
  checked += other.checked;
  failures += other.failures;
  worst_rel_error = std::max(worst_rel_error, other.worst_rel_error);
}

nn::Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double scale) {
  nn::Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * rng.Normal();
  return m;
}

GradCheckReport CheckLeafGradients(const LeafFn& f, std::vector<nn::Matrix> inputs,
                                   Rng& rng, const GradCheckOptions& opt) {
  nn::Matrix contraction;
  const auto evaluate = [&](bool backward, std::vector<nn::Matrix>* grads) {
    nn::Tape tape;
    std::vector<nn::Var> leaves;
    for (const auto& m : inputs) leaves.push_back(tape.Variable(m));
    nn::Var out = f(tape, leaves);
    if (contraction.size() == 0) contraction = RandomMatrix(out.rows(), out.cols(), rng);
    nn::Var loss = nn::Sum(nn::Mul(out, tape.Constant(contraction)));
    if (backward) {
      tape.Backward(loss);
      for (const auto& v : leaves) grads->push_back(tape.Grad(v));
    }
    return loss.value()(0, 0);
  };
  std::vector<nn::Matrix> analytic;
  evaluate(true, &analytic);
  GradCheckReport report;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (Eigen::Index i = 0; i < inputs[k].size(); ++i) {
      double& x = inputs[k].data()[i];
      const double saved = x;
      x = saved + opt.h;
      const double up = evaluate(false, nullptr);
      x = saved - opt.h;
      const double down = evaluate(false, nullptr);
      x = saved;
      Compare(analytic[k].data()[i], (up - down) / (2.0 * opt.h),
              fmt::format("input {} entry {}", k, i), opt, report);
    }
  }
  return report;
}

GradCheckReport CheckParamGradients(const ParamFn& f, nn::ParamStore& store,
                                    const GradCheckOptions& opt) {
  store.ZeroGrad();
  {
    nn::Tape tape;
    tape.Backward(f(tape));
  }
  std::vector<nn::Matrix> analytic;
  for (const auto& p : store.params()) analytic.push_back(p->grad);
  const auto value = [&] {
    nn::Tape tape;
    tape.set_params_frozen(true);
    return f(tape).value()(0, 0);
  };
  GradCheckReport report;
  for (std::size_t k = 0; k < store.params().size(); ++k) {
    nn::Parameter& p = *store.params()[k];
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      double& x = p.value.data()[i];
      const double saved = x;
      x = saved + opt.h;
      const double up = value();
      x = saved - opt.h;
      const double down = value();
      x = saved;
      Compare(analytic[k].data()[i], (up - down) / (2.0 * opt.h),
              fmt::format("{} entry {}", p.name, i), opt, report);
    }
  }
  return report;
}

}  // namespace ela::testing
