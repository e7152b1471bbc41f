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

#ifndef ELA_NN_PARAMS_H_
#define ELA_NN_PARAMS_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ela/nn/tensor.h"

namespace ela::nn {

// A trainable tensor with its gradient and Adam moment buffers.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix m;
  Matrix v;
};

// Named parameters in insertion order. Parameter addresses are stable for the
// lifetime of the store (including across moves), so layers may hold raw
// pointers into it.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  Parameter& Add(const std::string& name, Matrix init);
  bool Has(const std::string& name) const { return index_.contains(name); }
  Parameter& Get(const std::string& name);
  const Parameter& Get(const std::string& name) const;

  const std::vector<std::unique_ptr<Parameter>>& params() const {
    return params_;
  }

  // Sets every gradient to zeros of the parameter's shape.
  void ZeroGrad();
  std::int64_t NumScalars() const;

  // Number of Adam updates applied so far.
  std::int64_t step() const { return step_; }
  void set_step(std::int64_t step) { step_ = step; }

  // Copies values (not gradients or moments) from a store with identical
  // names and shapes.
  void CopyValuesFrom(const ParamStore& other);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::map<std::string, std::size_t> index_;
  std::int64_t step_ = 0;
};

}  // namespace ela::nn

#endif  // ELA_NN_PARAMS_H_
