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

#include "ela/common/rng.h"

#include <cmath>
#include <utility>

#include "ela/common/error.h"

namespace ela {

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  return Mix64(Mix64(master) ^ Mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t DeriveSeed(std::uint64_t master, std::string_view stream) {
  // FNV-1a over the stream name.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return DeriveSeed(master, h);
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::Normal() { return normal_(engine_); }

double Rng::Exponential() {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log(1.0 - Uniform());
}

int Rng::Categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    Check(w >= 0.0, "Categorical: negative weight");
    total += w;
  }
  Check(total > 0.0, "Categorical: weights sum to zero");
  const double u = Uniform() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  return last_positive;
}

int Rng::UniformInt(int n) {
  Check(n > 0, "UniformInt: n must be positive");
  return static_cast<int>(Uniform() * n);
}

std::vector<int> Rng::Permutation(int n) {
  Check(n >= 0, "Permutation: n must be non-negative");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[UniformInt(i + 1)]);
  return perm;
}

}  // namespace ela
