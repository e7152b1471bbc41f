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

#ifndef ELA_NN_TENSOR_H_
#define ELA_NN_TENSOR_H_

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ela::nn {

// Row-major double matrix. Batched activations are laid out one example per
// row.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

std::string ShapeString(const Eigen::Ref<const Matrix>& m);

// Throws NumericError naming `op` if m holds NaN or Inf.
void CheckFinite(const Eigen::Ref<const Matrix>& m, std::string_view op);

}  // namespace ela::nn

#endif  // ELA_NN_TENSOR_H_
