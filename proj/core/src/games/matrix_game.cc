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

#include "ela/games/matrix_game.h"

#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::games {

MixedStrategy::MixedStrategy(Eigen::VectorXd weights)
    : weights_(std::move(weights)) {
  Check(weights_.size() > 0, "MixedStrategy: empty weight vector");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i])) {
      Fail(fmt::format("MixedStrategy: weight {} is {}", i, weights_[i]));
    }
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(fmt::format("MixedStrategy: weights sum to {}, not 1", total));
  }
}

MixedStrategy MixedStrategy::Uniform(int n) {
  return MixedStrategy(Eigen::VectorXd::Constant(n, 1.0 / n));
}

MixedStrategy MixedStrategy::Pure(int n, int index) {
  Check(index >= 0 && index < n, "MixedStrategy::Pure: index out of range");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w[index] = 1.0;
  return MixedStrategy(std::move(w));
}

MatrixGame::MatrixGame(Eigen::MatrixXd payoff) : payoff_(std::move(payoff)) {
  Check(payoff_.rows() > 0 && payoff_.cols() > 0, "MatrixGame: empty payoff");
  Check(payoff_.allFinite(), "MatrixGame: payoff has non-finite entries");
}

bool MatrixGame::IsSymmetricZeroSum(double tol) const {
  if (payoff_.rows() != payoff_.cols()) return false;
  return ((payoff_ + payoff_.transpose()).cwiseAbs().array() <= tol).all();
}

MatrixGame RockPaperScissors() {
  Eigen::MatrixXd m(3, 3);
  m << 0, -1, 1,
       1, 0, -1,
       -1, 1, 0;
  return MatrixGame(std::move(m));
}

double MatrixExpectedReward(const MatrixGame& game, const MixedStrategy& row,
                            const MixedStrategy& col) {
  if (row.size() != game.rows() || col.size() != game.cols()) {
    Fail(fmt::format(
        "MatrixExpectedReward: dimension mismatch (game {}x{}, row {}, col {})",
        game.rows(), game.cols(), row.size(), col.size()));
  }
  return row.weights().dot(game.payoff() * col.weights());
}

BestResponse BestResponseValue(const MatrixGame& game,
                               const MixedStrategy& opponent) {
  if (opponent.size() != game.cols()) {
    Fail(fmt::format("BestResponseValue: opponent has {} weights, game has {} "
                     "columns",
                     opponent.size(), game.cols()));
  }
  const Eigen::VectorXd values = game.payoff() * opponent.weights();
  BestResponse best{0, values[0]};
  for (int i = 1; i < game.rows(); ++i) {
    if (values[i] > best.value) best = {i, values[i]};
  }
  return best;
}

double Exploitability(const MatrixGame& game, const MixedStrategy& strategy) {
  Check(game.IsSymmetricZeroSum(1e-12),
        "Exploitability: payoff matrix is not symmetric zero-sum");
  return BestResponseValue(game, strategy).value;
}

}  // namespace ela::games
