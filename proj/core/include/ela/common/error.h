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

#ifndef ELA_COMMON_ERROR_H_
#define ELA_COMMON_ERROR_H_

#include <stdexcept>
#include <string>

namespace ela {

// All recoverable failures in the library surface as ela::Error.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a tensor operation produces NaN or Inf.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(what) {}
};

[[noreturn]] inline void Fail(const std::string& what) { throw Error(what); }

inline void Check(bool condition, const std::string& what) {
  if (!condition) throw Error(what);
}

}  // namespace ela

#endif  // ELA_COMMON_ERROR_H_
