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

#ifndef ELA_NN_CHECKPOINT_H_
#define ELA_NN_CHECKPOINT_H_

#include <string>

#include <nlohmann/json.hpp>

#include "ela/nn/params.h"

namespace ela::nn {

inline constexpr int kCheckpointFormatVersion = 1;

// Checkpoint layout (JSON):
//   {"format": "ela-checkpoint", "format_version": 1, "meta": {...},
//    "step": <adam steps>,
//    "params": [{"name": ..., "shape": [rows, cols], "values": [...]}, ...]}
// Values are row-major. Parameters appear in store insertion order.
nlohmann::json CheckpointToJson(const ParamStore& store,
                                const nlohmann::json& meta);
void SaveCheckpoint(const std::string& path, const ParamStore& store,
                    const nlohmann::json& meta);

nlohmann::json ReadCheckpointJson(const std::string& path);
// Overwrites values of `store` from a checkpoint with identical names and
// shapes. Returns the checkpoint's meta object.
nlohmann::json LoadParamsFromJson(const nlohmann::json& ckpt, ParamStore& store);

}  // namespace ela::nn

#endif  // ELA_NN_CHECKPOINT_H_
