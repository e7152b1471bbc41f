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

#ifndef ELA_GAMES_MATRIX_GAME_H_
#define ELA_GAMES_MATRIX_GAME_H_

#include <Eigen/Dense>

namespace ela::games {

// Convex weights over the n pure strategies of a matrix game.
class MixedStrategy {
 public:
  // Throws if any weight is negative or the weights do not sum to 1 (1e-9).
  explicit MixedStrategy(Eigen::VectorXd weights);

  static MixedStrategy Uniform(int n);
  static MixedStrategy Pure(int n, int index);

  const Eigen::VectorXd& weights() const { return weights_; }
  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }

 private:
  Eigen::VectorXd weights_;
};

// Two-player matrix game; payoff(i, j) is the row player's reward when the
// row player picks pure strategy i and the column player picks j.
class MatrixGame {
 public:
  explicit MatrixGame(Eigen::MatrixXd payoff);

  const Eigen::MatrixXd& payoff() const { return payoff_; }
  int rows() const { return static_cast<int>(payoff_.rows()); }
  int cols() const { return static_cast<int>(payoff_.cols()); }

  // payoff(i, j) == -payoff(j, i) within tol.
  bool IsSymmetricZeroSum(double tol = 1e-12) const;

 private:
  Eigen::MatrixXd payoff_;
};

// Rock (0), paper (1), scissors (2); +1 win, -1 loss, 0 draw.
MatrixGame RockPaperScissors();

// row^T * payoff * col.
double MatrixExpectedReward(const MatrixGame& game, const MixedStrategy& row,
                            const MixedStrategy& col);

struct BestResponse {
  int index = 0;
  double value = 0.0;
};

// Best pure row strategy against a column opponent. Ties go to the lowest
// index.
BestResponse BestResponseValue(const MatrixGame& game,
                               const MixedStrategy& opponent);

// Exploitability of a strategy in a symmetric zero-sum matrix game: the
// reward a best-responding opponent obtains against it. Throws on a payoff
// matrix that is not antisymmetric.
double Exploitability(const MatrixGame& game, const MixedStrategy& strategy);

}  // namespace ela::games

#endif  // ELA_GAMES_MATRIX_GAME_H_
