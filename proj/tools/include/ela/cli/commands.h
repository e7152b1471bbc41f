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

#ifndef ELA_CLI_COMMANDS_H_
#define ELA_CLI_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ela/el/el.h"
#include "ela/ol/offline.h"
#include "ela/pvrnn/pvrnn.h"

namespace ela::cli {

inline constexpr int kFileFormatVersion = 1;

// An error tagged with the pipeline stage or command that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// "ela format_version=1 seed=<seed> command=<command>", the first line of
// every CSV the tool writes.
std::string FileComment(std::uint64_t seed, std::string_view command);

struct GenDataOptions {
  std::string env = "rps";
  std::int64_t games = 1000;
  std::string pool;
  int rounds = 500;
  std::uint64_t seed = 0;
  std::string out;
};
void GenData(const GenDataOptions& opt, std::ostream& log);

// Each representation row gets one update per epoch, so the tool defaults to
// a larger step for the table than for the network weights.
inline constexpr double kDefaultReprLr = 0.05;

struct TrainReprOptions {
  std::string data;
  pvrnn::PvrnnHyper hyper{.repr_lr = kDefaultReprLr};
  std::uint64_t seed = 0;
  std::string out_model;
  std::string out_repr;
};
void TrainRepr(const TrainReprOptions& opt, std::ostream& log);

struct InferReprOptions {
  std::string data;
  std::string model;
  std::uint64_t seed = 0;
  std::string out_repr;
};
void InferRepr(const InferReprOptions& opt, std::ostream& log);

struct EstimateElOptions {
  std::string model;
  std::string repr;
  std::string data;
  std::string out;
  // Use the checkpoint at `model` instead of fitting and writing it.
  bool pretrained = false;
  // "mlp" regresses on representations; "gru" reads the raw trajectories.
  std::string estimator = "mlp";
  el::ElHyper hyper;
  el::GruElHyper gru_hyper;
  std::uint64_t seed = 0;
};
void EstimateEl(const EstimateElOptions& opt, std::ostream& log);

struct ElDeltaOptions {
  std::string repr;
  std::string data;
  // <= 0 selects 0.2 x the median pairwise distance.
  double delta = 0.0;
  std::string out;
};
void ElDeltaCommand(const ElDeltaOptions& opt, std::ostream& log);

struct TrainPolicyOptions {
  std::string data;
  std::string filter = "none";
  std::string el;
  double thresh = 1.0;
  ol::PolicyHyper hyper;
  std::uint64_t seed = 0;
  std::string out;
  // Optional: where to write the filtered dataset.
  std::string out_data;
};
void TrainPolicy(const TrainPolicyOptions& opt, std::ostream& log);

struct EvaluateOptions {
  std::string a;
  // A policy checkpoint or "pool:<spec>".
  std::string b;
  std::int64_t games = 500;
  std::uint64_t seed = 0;
  std::string out;
};
void Evaluate(const EvaluateOptions& opt, std::ostream& log);

struct CrossEvalOptions {
  std::string models;
  std::int64_t games = 500;
  std::uint64_t seed = 0;
  std::string out;
};
void CrossEval(const CrossEvalOptions& opt, std::ostream& log);

struct VerifyToyOptions {
  int n = 3;
  std::int64_t samples = 1000000;
  int profiles = 50;
  std::uint64_t seed = 0;
  std::string out;
};
void VerifyToy(const VerifyToyOptions& opt, std::ostream& log);

struct VerifyPropsOptions {
  int trials = 1000;
  std::uint64_t seed = 0;
  std::string out;
};
// Returns the total number of violations.
int VerifyProps(const VerifyPropsOptions& opt, std::ostream& log);

struct ExportEmbeddingsOptions {
  std::string repr;
  std::string el;
  std::string out;
};
void ExportEmbeddings(const ExportEmbeddingsOptions& opt, std::ostream& log);

// key=value run configuration. Unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  static RunConfig FromFile(const std::string& path);
  void Set(const std::string& key, const std::string& value);
  // Parses "key=value".
  void SetAssignment(const std::string& assignment);

  const std::string& Get(const std::string& key) const;
  std::int64_t GetInt(const std::string& key) const;
  double GetDouble(const std::string& key) const;
  std::vector<double> GetDoubleList(const std::string& key) const;

  // Sorted key=value lines.
  std::string Serialize() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct PipelineResult {
  std::string out_dir;
  std::vector<std::string> artifacts;
  double bc_exploitability = 0.0;
  double wt_exploitability = 0.0;
  double ela_exploitability = 0.0;
  double ela_threshold = 1.0;
};

// gen-data -> train-repr -> estimate-el -> train-policy (none, wt, ela) ->
// evaluate. Writes config.resolved, summary.csv and manifest.csv under
// out_dir. On failure writes out_dir/FAILED and rethrows as StageError.
PipelineResult RunPipeline(const RunConfig& config, std::ostream& log);

// FNV-1a 64-bit hash of a file's bytes, as 16 hex digits.
std::string HashFile(const std::string& path);

// Full command-line entry point. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace ela::cli

#endif  // ELA_CLI_COMMANDS_H_
