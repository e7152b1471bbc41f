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

#ifndef ELA_GAMES_TRAJECTORY_H_
#define ELA_GAMES_TRAJECTORY_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ela::games {

inline constexpr int kDatasetFormatVersion = 1;

struct Step {
  std::vector<double> obs;
  int action = 0;

  friend bool operator==(const Step&, const Step&) = default;
};

// One player's view of one episode. demonstrator_tag is carried for
// evaluation and plotting only; no training routine reads it.
struct Trajectory {
  std::int64_t game_id = 0;
  int player_index = 0;
  double reward = 0.0;
  std::string demonstrator_tag;
  std::vector<Step> steps;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct TrajectoryKey {
  std::int64_t game_id = 0;
  int player_index = 0;

  friend auto operator<=>(const TrajectoryKey&, const TrajectoryKey&) = default;
};

inline TrajectoryKey KeyOf(const Trajectory& t) {
  return {t.game_id, t.player_index};
}

struct DatasetMetadata {
  int format_version = kDatasetFormatVersion;
  std::string env = "rps";
  int rps_rounds = 500;
  std::uint64_t seed = 0;
  std::int64_t num_games = 0;
  std::string pool;

  friend bool operator==(const DatasetMetadata&,
                         const DatasetMetadata&) = default;
};

struct Dataset {
  DatasetMetadata meta;
  std::vector<Trajectory> trajectories;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// True when every game_id appears exactly once per player index {0, 1}.
bool HasCompletePairs(const Dataset& dataset);

// JSON Lines: a header object followed by one trajectory per line.
void WriteDatasetJsonl(const Dataset& dataset, std::ostream& out);
Dataset ReadDatasetJsonl(std::istream& in);
void SaveDataset(const Dataset& dataset, const std::string& path);
Dataset LoadDataset(const std::string& path);

}  // namespace ela::games

#endif  // ELA_GAMES_TRAJECTORY_H_
