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

#include "ela/games/trajectory.h"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ela/common/error.h"

namespace ela::games {
namespace {

using nlohmann::json;

json HeaderToJson(const DatasetMetadata& meta) {
  return json{{"kind", "header"},
              {"format_version", meta.format_version},
              {"env", meta.env},
              {"rps_rounds", meta.rps_rounds},
              {"seed", meta.seed},
              {"num_games", meta.num_games},
              {"pool", meta.pool}};
}

json TrajectoryToJson(const Trajectory& t, const DatasetMetadata& meta) {
  json steps = json::array();
  for (const Step& s : t.steps) {
    steps.push_back(json{{"obs", s.obs}, {"action", s.action}});
  }
  return json{{"format_version", meta.format_version},
              {"env", meta.env},
              {"game_id", t.game_id},
              {"player_index", t.player_index},
              {"demonstrator_tag", t.demonstrator_tag},
              {"reward", t.reward},
              {"steps", std::move(steps)}};
}

}  // namespace

bool HasCompletePairs(const Dataset& dataset) {
  std::map<std::int64_t, int> seen;  // bitmask of player indices
  for (const Trajectory& t : dataset.trajectories) {
    if (t.player_index < 0 || t.player_index > 1) return false;
    int& mask = seen[t.game_id];
    const int bit = 1 << t.player_index;
    if (mask & bit) return false;
    mask |= bit;
  }
  for (const auto& [id, mask] : seen) {
    if (mask != 3) return false;
  }
  return true;
}

void WriteDatasetJsonl(const Dataset& dataset, std::ostream& out) {
  out << HeaderToJson(dataset.meta).dump() << '\n';
  for (const Trajectory& t : dataset.trajectories) {
    out << TrajectoryToJson(t, dataset.meta).dump() << '\n';
  }
}

Dataset ReadDatasetJsonl(std::istream& in) {
  Dataset dataset;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      Fail(fmt::format("dataset line {}: {}", line_no, e.what()));
    }
    try {
      if (!have_header) {
        if (j.value("kind", "") != "header") {
          Fail(fmt::format("dataset line {}: expected header", line_no));
        }
        DatasetMetadata& m = dataset.meta;
        m.format_version = j.at("format_version").get<int>();
        if (m.format_version != kDatasetFormatVersion) {
          Fail(fmt::format("unsupported dataset format_version {}",
                           m.format_version));
        }
        m.env = j.at("env").get<std::string>();
        m.rps_rounds = j.at("rps_rounds").get<int>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.num_games = j.at("num_games").get<std::int64_t>();
        m.pool = j.at("pool").get<std::string>();
        have_header = true;
        continue;
      }
      if (j.at("env").get<std::string>() != dataset.meta.env) {
        Fail(fmt::format("dataset line {}: environment differs from header",
                         line_no));
      }
      Trajectory t;
      t.game_id = j.at("game_id").get<std::int64_t>();
      t.player_index = j.at("player_index").get<int>();
      t.reward = j.at("reward").get<double>();
      if (j.contains("demonstrator_tag") && !j["demonstrator_tag"].is_null()) {
        t.demonstrator_tag = j["demonstrator_tag"].get<std::string>();
      }
      for (const json& s : j.at("steps")) {
        t.steps.push_back(
            Step{s.at("obs").get<std::vector<double>>(), s.at("action").get<int>()});
      }
      if (t.steps.empty()) {
        Fail(fmt::format("dataset line {}: trajectory has no steps", line_no));
      }
      dataset.trajectories.push_back(std::move(t));
    } catch (const json::exception& e) {
      Fail(fmt::format("dataset line {}: {}", line_no, e.what()));
    }
  }
  Check(have_header, "dataset is empty (no header line)");
  return dataset;
}

void SaveDataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  Check(out.good(), fmt::format("cannot open '{}' for writing", path));
  WriteDatasetJsonl(dataset, out);
  Check(out.good(), fmt::format("failed writing '{}'", path));
}

Dataset LoadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  Check(in.good(), fmt::format("cannot open dataset '{}'", path));
  return ReadDatasetJsonl(in);
}

}  // namespace ela::games
