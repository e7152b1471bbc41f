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

#ifndef ELA_COMMON_RNG_H_
#define ELA_COMMON_RNG_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace ela {

// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t Mix64(std::uint64_t x);

// Child seed for (master, index). Distinct indices give decorrelated streams.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// Child seed for a named substream, e.g. DeriveSeed(seed, "data").
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view stream);

// Thin wrapper over mt19937_64. All randomness in the library flows through
// explicit Rng instances so that every result is reproducible from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  double Normal();
  double Exponential();
  // Index drawn from an unnormalized non-negative weight vector.
  int Categorical(std::span<const double> weights);
  // Uniform integer in [0, n).
  int UniformInt(int n);
  // Uniformly random permutation of 0..n-1 (Fisher-Yates).
  std::vector<int> Permutation(int n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ela

#endif  // ELA_COMMON_RNG_H_
