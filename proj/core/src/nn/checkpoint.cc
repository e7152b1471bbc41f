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

#include "ela/nn/checkpoint.h"

#include <fstream>

#include <fmt/format.h>

#include "ela/common/error.h"

namespace ela::nn {

using nlohmann::json;

json CheckpointToJson(const ParamStore& store, const json& meta) {
  json params = json::array();
  for (const auto& p : store.params()) {
    std::vector<double> values(p->value.data(),
                               p->value.data() + p->value.size());
    params.push_back({{"name", p->name},
                      {"shape", {p->value.rows(), p->value.cols()}},
                      {"values", values}});
  }
  return {{"format", "ela-checkpoint"},
          {"format_version", kCheckpointFormatVersion},
          {"meta", meta},
          {"step", store.step()},
          {"params", params}};
}

void SaveCheckpoint(const std::string& path, const ParamStore& store,
                    const json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(fmt::format("cannot open '{}' for writing", path));
  out << CheckpointToJson(store, meta).dump() << '\n';
  if (!out) Fail(fmt::format("failed writing '{}'", path));
}

json ReadCheckpointJson(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(fmt::format("cannot open checkpoint '{}'", path));
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Fail(fmt::format("checkpoint '{}' is not valid JSON: {}", path, e.what()));
  }
  if (j.value("format", "") != "ela-checkpoint") {
    Fail(fmt::format("'{}' is not an ela checkpoint", path));
  }
  if (j.value("format_version", -1) != kCheckpointFormatVersion) {
    Fail(fmt::format("checkpoint '{}' has unsupported format_version", path));
  }
  return j;
}

json LoadParamsFromJson(const json& ckpt, ParamStore& store) {
  const json& params = ckpt.at("params");
  if (params.size() != store.params().size()) {
    Fail(fmt::format("checkpoint has {} parameters, model expects {}",
                     params.size(), store.params().size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *store.params()[i];
    const json& e = params[i];
    const auto name = e.at("name").get<std::string>();
    const auto rows = e.at("shape").at(0).get<Eigen::Index>();
    const auto cols = e.at("shape").at(1).get<Eigen::Index>();
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      Fail(fmt::format("checkpoint parameter '{}' [{}x{}] does not match '{}' {}",
                       name, rows, cols, p.name, ShapeString(p.value)));
    }
    const auto values = e.at("values").get<std::vector<double>>();
    Check(static_cast<Eigen::Index>(values.size()) == rows * cols,
          fmt::format("checkpoint parameter '{}' has wrong value count", name));
    std::copy(values.begin(), values.end(), p.value.data());
    CheckFinite(p.value, "checkpoint load");
  }
  store.set_step(ckpt.value("step", std::int64_t{0}));
  return ckpt.value("meta", json::object());
}

}  // namespace ela::nn
