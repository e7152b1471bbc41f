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

#ifndef ELA_TESTS_SUPPORT_ORACLES_H_
#define ELA_TESTS_SUPPORT_ORACLES_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ela/games/strategy.h"

// Reference computations written independently of the library so tests do
// not check code against itself.
namespace ela::testing {

// Expected chips for seat 0 by walking every deal and betting line.
double KuhnTreeValue(const games::Strategy& seat0, const games::Strategy& seat1);

// Best response by trying every pure plan of the exploiter (64 per seat).
// Returns the exploiter's expected chips.
double KuhnBruteForceBestResponse(const games::Strategy& victim, int victim_seat);

// E[-r | r <= 0] for r = a . rewards with a uniform on the simplex, by a
// midpoint rule over a triangular grid with `resolution` cells per edge.
// Only n = 3.
double SimplexConditionalLossGrid(const Eigen::Vector3d& rewards, int resolution);

// KL(N(mq, sq^2) || N(mp, sp^2)) in one dimension by quadrature.
double KlQuadrature1d(double mq, double sq, double mp, double sp);

double SpearmanCorrelation(std::span<const double> x, std::span<const double> y);

// Majority vote among the k nearest training rows (Euclidean); ties go to
// the nearest neighbour's label among the tied classes.
double KnnAccuracy(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                   const Eigen::MatrixXd& test, std::span<const int> test_labels, int k);

}  // namespace ela::testing

#endif  // ELA_TESTS_SUPPORT_ORACLES_H_
