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

#include "ela/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "ela/common/csv.h"
#include "ela/nn/checkpoint.h"
#include "ela/common/error.h"
#include "ela/games/demonstrators.h"
#include "ela/games/matrix_game.h"
#include "ela/games/trajectory.h"
#include "ela/simplex/bounds.h"
#include "ela/simplex/simplex.h"

namespace ela::cli {
namespace {

namespace fs = std::filesystem;
using games::TrajectoryKey;

std::string KeyString(const TrajectoryKey& k) {
  return fmt::format("({}, {})", k.game_id, k.player_index);
}

void Require(const std::string& value, std::string_view flag) {
  if (value.empty()) Fail(fmt::format("missing required option {}", flag));
}

void RequireFile(const std::string& path, std::string_view what) {
  if (!fs::exists(path)) Fail(fmt::format("{} '{}' does not exist", what, path));
}

games::Dataset LoadData(const std::string& path) {
  RequireFile(path, "dataset");
  return games::LoadDataset(path);
}

std::map<TrajectoryKey, const games::Trajectory*> IndexByKey(
    const games::Dataset& dataset) {
  std::map<TrajectoryKey, const games::Trajectory*> index;
  for (const auto& t : dataset.trajectories) {
    if (!index.emplace(games::KeyOf(t), &t).second) {
      Fail(fmt::format("dataset has duplicate trajectory {}",
                       KeyString(games::KeyOf(t))));
    }
  }
  return index;
}

// Samples (representation, reward) aligned with the representation rows.
std::vector<el::ElSample> JoinRewards(
    const std::vector<pvrnn::RepresentationRow>& rows,
    const games::Dataset& dataset) {
  const auto index = IndexByKey(dataset);
  std::vector<el::ElSample> samples;
  std::vector<std::string> orphans;
  for (const auto& r : rows) {
    const auto it = index.find(r.key);
    if (it == index.end()) {
      orphans.push_back(KeyString(r.key));
      continue;
    }
    samples.push_back({r.l, it->second->reward});
  }
  if (!orphans.empty()) {
    Fail(fmt::format("{} representation rows have no trajectory in the dataset, "
                     "first: {}",
                     orphans.size(), orphans.front()));
  }
  return samples;
}

std::string PolicyMetaEnv(const std::string& path, int* rounds) {
  const auto ckpt = nn::ReadCheckpointJson(path);
  const auto& meta = ckpt.at("meta");
  *rounds = meta.value("rps_rounds", 500);
  return meta.value("env", std::string("rps"));
}

void EnsureParent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

std::uint64_t Fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string FileComment(std::uint64_t seed, std::string_view command) {
  return fmt::format("ela format_version={} seed={} command={}", kFileFormatVersion,
                     seed, command);
}

std::string HashFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(fmt::format("cannot open '{}'", path));
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return fmt::format("{:016x}", Fnv1a(bytes));
}

void GenData(const GenDataOptions& opt, std::ostream& log) {
  Require(opt.pool, "--pool");
  Require(opt.out, "--out");
  if (opt.games < 1) Fail("--games must be >= 1");
  if (opt.rounds < 1) Fail("--rounds must be >= 1");
  const games::EnvKind kind = games::ParseEnvKind(opt.env);
  const games::DemonstratorPool pool = games::ParsePoolSpec(kind, opt.pool);
  const games::Dataset dataset =
      games::GenerateDataset(pool, opt.games, {kind, opt.rounds}, opt.seed);
  EnsureParent(opt.out);
  games::SaveDataset(dataset, opt.out);
  log << fmt::format("wrote {} trajectories ({} games) to {}\n",
                     dataset.trajectories.size(), opt.games, opt.out);
}

void TrainRepr(const TrainReprOptions& opt, std::ostream& log) {
  Require(opt.data, "--data");
  Require(opt.out_model, "--out-model");
  Require(opt.out_repr, "--out-repr");
  const games::Dataset dataset = LoadData(opt.data);
  const games::EnvKind kind = games::ParseEnvKind(dataset.meta.env);
  // The learner only sees observation/action sequences.
  const std::vector<pvrnn::Sequence> sequences = pvrnn::ToSequences(dataset);
  const pvrnn::TrainResult result =
      pvrnn::Train(sequences, games::ObservationWidth(kind),
                   games::NumActions(kind), opt.hyper, opt.seed);
  EnsureParent(opt.out_model);
  EnsureParent(opt.out_repr);
  pvrnn::SaveModel(opt.out_model, result.model);
  std::vector<pvrnn::RepresentationRow> rows;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const auto& t = dataset.trajectories[i];
    rows.push_back({games::KeyOf(t), t.demonstrator_tag,
                    result.table.values.row(static_cast<Eigen::Index>(i)).transpose()});
  }
  pvrnn::WriteRepresentationCsv(opt.out_repr, rows,
                                FileComment(opt.seed, "train-repr"));
  for (std::size_t e = 0; e < result.epoch_loss.size(); ++e) {
    if (e + 1 == result.epoch_loss.size() || e % 10 == 0) {
      log << fmt::format("epoch {} loss {:.4f}\n", e + 1, result.epoch_loss[e]);
    }
  }
  log << fmt::format("wrote {} representations to {}\n", rows.size(), opt.out_repr);
}

void InferRepr(const InferReprOptions& opt, std::ostream& log) {
  Require(opt.data, "--data");
  Require(opt.model, "--model");
  Require(opt.out_repr, "--out-repr");
  const games::Dataset dataset = LoadData(opt.data);
  RequireFile(opt.model, "model");
  const pvrnn::PvrnnModel model = pvrnn::LoadModel(opt.model);
  const std::vector<pvrnn::Sequence> sequences = pvrnn::ToSequences(dataset);
  const nn::Matrix l = pvrnn::InferRepresentations(model, sequences, opt.seed);
  std::vector<pvrnn::RepresentationRow> rows;
  for (std::size_t i = 0; i < dataset.trajectories.size(); ++i) {
    const auto& t = dataset.trajectories[i];
    rows.push_back({games::KeyOf(t), t.demonstrator_tag,
                    l.row(static_cast<Eigen::Index>(i)).transpose()});
  }
  EnsureParent(opt.out_repr);
  pvrnn::WriteRepresentationCsv(opt.out_repr, rows,
                                FileComment(opt.seed, "infer-repr"));
  log << fmt::format("wrote {} inferred representations to {}\n", rows.size(),
                     opt.out_repr);
}

std::vector<double> MlpEstimates(const EstimateElOptions& opt,
                                 const std::vector<pvrnn::RepresentationRow>& rows,
                                 const std::vector<el::ElSample>& samples,
                                 std::ostream& log) {
  el::ElModel model = [&] {
    if (opt.pretrained) {
      RequireFile(opt.model, "EL model");
      return el::LoadElModel(opt.model);
    }
    el::ElModel fitted = el::TrainElModel(samples, opt.hyper, opt.seed);
    EnsureParent(opt.model);
    el::SaveElModel(opt.model, fitted);
    log << fmt::format("fitted EL model (target scale {:.4f}) -> {}\n",
                       fitted.target_scale(), opt.model);
    return fitted;
  }();
  nn::Matrix l(static_cast<Eigen::Index>(rows.size()), model.l_dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].l.size() != model.l_dim()) {
      Fail(fmt::format("representation width {} does not match EL model width {}",
                       rows[i].l.size(), model.l_dim()));
    }
    l.row(static_cast<Eigen::Index>(i)) = rows[i].l.transpose();
  }
  const std::vector<double> raw = model.EstimateRows(l);
  return model.EstimateRows(l);
}

// Trajectory-level estimator; rows only fix the output order.
std::vector<double> GruEstimates(const EstimateElOptions& opt,
                                 const std::vector<pvrnn::RepresentationRow>& rows,
                                 const games::Dataset& dataset,
                                 const std::vector<el::ElSample>& samples,
                                 std::ostream& log) {
  const auto index = IndexByKey(dataset);
  std::vector<pvrnn::Sequence> sequences;
  std::vector<double> rewards;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sequences.push_back(pvrnn::ToSequence(*index.at(rows[i].key)));
    rewards.push_back(samples[i].reward);
  }
  const games::EnvKind kind = games::ParseEnvKind(dataset.meta.env);
  el::GruElModel model = [&] {
    if (opt.pretrained) {
      RequireFile(opt.model, "EL model");
      return el::LoadGruElModel(opt.model);
    }
    el::GruElModel fitted = el::TrainGruElModel(sequences, rewards, games::ObservationWidth(kind),
                                                games::NumActions(kind), opt.gru_hyper, opt.seed);
    EnsureParent(opt.model);
    el::SaveGruElModel(opt.model, fitted);
    log << fmt::format("fitted GRU EL model (target scale {:.4f}) -> {}\n",
                       fitted.target_scale(), opt.model);
    return fitted;
  }();
  std::vector<double> raw;
  const int batch = 256;
  for (std::size_t start = 0; start < sequences.size(); start += batch) {
    std::vector<const pvrnn::Sequence*> ptrs;
    for (std::size_t i = start; i < std::min(sequences.size(), start + batch); ++i) {
      ptrs.push_back(&sequences[i]);
    }
    for (double v : model.EstimateBatch(ptrs)) raw.push_back(v);
  }
  return raw;
}

void EstimateEl(const EstimateElOptions& opt, std::ostream& log) {
  Require(opt.model, "--model");
  Require(opt.repr, "--repr");
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  RequireFile(opt.repr, "representation file");
  const auto rows = pvrnn::ReadRepresentationCsv(opt.repr);
  const games::Dataset dataset = LoadData(opt.data);
  const std::vector<el::ElSample> samples = JoinRewards(rows, dataset);
  const std::vector<double> raw =
      opt.estimator == "gru" ? GruEstimates(opt, rows, dataset, samples, log)
                             : MlpEstimates(opt, rows, samples, log);
  const std::vector<double> scaled = el::NormalizeEl(raw);
  CsvTable table;
  table.comment = FileComment(opt.seed, "estimate-el");
  table.header = {"game_id", "player_index", "demonstrator_tag", "reward",
                  "el_raw", "el_scaled"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    table.rows.push_back({std::to_string(rows[i].key.game_id),
                          std::to_string(rows[i].key.player_index), rows[i].tag,
                          FormatDouble(samples[i].reward), FormatDouble(raw[i]),
                          FormatDouble(scaled[i])});
  }
  EnsureParent(opt.out);
  WriteCsv(opt.out, table);
  log << fmt::format("wrote EL estimates for {} trajectories to {}\n", rows.size(),
                     opt.out);
}

void ElDeltaCommand(const ElDeltaOptions& opt, std::ostream& log) {
  Require(opt.repr, "--repr");
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  RequireFile(opt.repr, "representation file");
  const auto rows = pvrnn::ReadRepresentationCsv(opt.repr);
  const games::Dataset dataset = LoadData(opt.data);
  const std::vector<el::ElSample> samples = JoinRewards(rows, dataset);
  const double delta = opt.delta > 0.0 ? opt.delta : el::DefaultDelta(samples);
  const std::vector<double> values = el::ElDeltaAll(samples, delta, false);
  CsvTable table;
  table.comment = FileComment(0, "el-delta") + fmt::format(" delta={}", delta);
  table.header = {"game_id", "player_index", "demonstrator_tag", "reward", "el_delta"};
  int undefined = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (std::isnan(values[i])) ++undefined;
    table.rows.push_back({std::to_string(rows[i].key.game_id),
                          std::to_string(rows[i].key.player_index), rows[i].tag,
                          FormatDouble(samples[i].reward),
                          std::isnan(values[i]) ? "nan" : FormatDouble(values[i])});
  }
  EnsureParent(opt.out);
  WriteCsv(opt.out, table);
  log << fmt::format("delta {:.6g}: wrote {} estimates ({} undefined) to {}\n", delta,
                     rows.size(), undefined, opt.out);
}

ol::ElAssignment ReadScaledEl(const std::string& path) {
  RequireFile(path, "EL file");
  const CsvTable table = ReadCsv(path);
  const int gid = table.Column("game_id");
  const int pid = table.Column("player_index");
  const int scaled = table.Column("el_scaled");
  ol::ElAssignment out;
  for (const auto& r : table.rows) {
    out[{ParseInt(r[gid]), static_cast<int>(ParseInt(r[pid]))}] = ParseDouble(r[scaled]);
  }
  return out;
}

void TrainPolicy(const TrainPolicyOptions& opt, std::ostream& log) {
  Require(opt.data, "--data");
  Require(opt.out, "--out");
  const games::Dataset dataset = LoadData(opt.data);
  ol::FilterConfig cfg{ol::ParseFilterMode(opt.filter), opt.thresh};
  ol::ElAssignment el;
  if (cfg.mode == ol::FilterMode::kEla) {
    Require(opt.el, "--el");
    el = ReadScaledEl(opt.el);
  }
  const games::Dataset kept = ol::FilterDataset(dataset, &el, cfg);
  if (!opt.out_data.empty()) {
    EnsureParent(opt.out_data);
    games::SaveDataset(kept, opt.out_data);
  }
  const ol::BcResult bc = ol::TrainBc(kept, opt.hyper, opt.seed);
  EnsureParent(opt.out);
  ol::SavePolicy(opt.out, bc.policy,
                 {{"env", dataset.meta.env}, {"rps_rounds", dataset.meta.rps_rounds}});
  log << fmt::format("filter {} kept {}/{} trajectories; final log-likelihood {:.5f}; "
                     "wrote {}\n",
                     ol::FilterModeName(cfg.mode), kept.trajectories.size(),
                     dataset.trajectories.size(),
                     bc.epoch_log_likelihood.empty() ? 0.0
                                                     : bc.epoch_log_likelihood.back(),
                     opt.out);
}

void Evaluate(const EvaluateOptions& opt, std::ostream& log) {
  Require(opt.a, "--a");
  Require(opt.b, "--b");
  RequireFile(opt.a, "policy");
  int rounds = 500;
  const std::string env_name = PolicyMetaEnv(opt.a, &rounds);
  const games::EnvConfig env{games::ParseEnvKind(env_name), rounds};
  const ol::Policy a = ol::LoadPolicy(opt.a);
  const ol::Agent agent_a = ol::AgentOf(fs::path(opt.a).stem().string(), a);
  CsvTable table;
  table.comment = FileComment(opt.seed, "evaluate");
  table.header = {"a", "b", "games", "score", "std_error"};
  if (opt.b.rfind("pool:", 0) == 0) {
    const games::DemonstratorPool pool =
        games::ParsePoolSpec(env.kind, opt.b.substr(5));
    table.header.push_back("exact_loss");
    const ol::SupportedExploitability se =
        ol::ComputeSupportedExploitability(a, pool, env, opt.games, opt.seed);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& d = pool.entries()[i];
      const ol::Score s = ol::EvaluateAvgScore(
          agent_a, ol::AgentOf(d), env, opt.games,
          DeriveSeed(opt.seed, static_cast<std::uint64_t>(i)));
      table.rows.push_back({agent_a.name, d.tag, std::to_string(opt.games),
                            FormatDouble(s.mean), FormatDouble(s.std_error),
                            FormatDouble(se.per_demonstrator[i])});
      log << fmt::format("{} vs {}: score {:+.4f} +- {:.4f}\n", agent_a.name, d.tag,
                         s.mean, s.std_error);
    }
    log << fmt::format("supported exploitability {:.6f} ({})\n", se.value,
                       se.exact ? "exact" : "simulated");
  } else {
    RequireFile(opt.b, "policy");
    const ol::Policy b = ol::LoadPolicy(opt.b);
    const ol::Agent agent_b = ol::AgentOf(fs::path(opt.b).stem().string(), b);
    const ol::Score s = ol::EvaluateAvgScore(agent_a, agent_b, env, opt.games, opt.seed);
    table.rows.push_back({agent_a.name, agent_b.name, std::to_string(opt.games),
                          FormatDouble(s.mean), FormatDouble(s.std_error)});
    log << fmt::format("{} vs {}: score {:+.4f} +- {:.4f}\n", agent_a.name,
                       agent_b.name, s.mean, s.std_error);
  }
  if (!opt.out.empty()) {
    EnsureParent(opt.out);
    WriteCsv(opt.out, table);
  }
}

void CrossEval(const CrossEvalOptions& opt, std::ostream& log) {
  Require(opt.models, "--models");
  Require(opt.out, "--out");
  if (!fs::is_directory(opt.models)) {
    Fail(fmt::format("model directory '{}' does not exist", opt.models));
  }
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(opt.models)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.size() < 2) {
    Fail(fmt::format("cross-eval needs at least two policy checkpoints in '{}'",
                     opt.models));
  }
  int rounds = 500;
  const std::string env_name = PolicyMetaEnv(paths.front().string(), &rounds);
  const games::EnvConfig env{games::ParseEnvKind(env_name), rounds};
  std::vector<ol::Policy> policies;
  std::vector<std::string> names;
  for (const auto& p : paths) {
    int r = 0;
    if (PolicyMetaEnv(p.string(), &r) != env_name || r != rounds) {
      Fail(fmt::format("'{}' was trained on a different environment", p.string()));
    }
    policies.push_back(ol::LoadPolicy(p.string()));
    std::string name = p.filename().string();
    for (std::string_view suffix : {".json", ".ckpt"}) {
      if (name.size() > suffix.size() &&
          name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        name.resize(name.size() - suffix.size());
      }
    }
    names.push_back(name);
  }
  std::vector<ol::Agent> agents;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    agents.push_back(ol::AgentOf(names[i], policies[i]));
  }
  const nn::Matrix m = ol::CrossEvaluate(agents, env, opt.games, opt.seed);
  CsvTable table;
  table.comment = FileComment(opt.seed, "cross-eval") +
                  " cell=score_of_column_vs_row";
  table.header = {"row"};
  for (const auto& n : names) table.header.push_back(n);
  for (std::size_t i = 0; i < names.size(); ++i) {
    std::vector<std::string> row = {names[i]};
    for (std::size_t j = 0; j < names.size(); ++j) {
      row.push_back(FormatDouble(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
    }
    table.rows.push_back(std::move(row));
  }
  EnsureParent(opt.out);
  WriteCsv(opt.out, table);
  log << fmt::format("wrote {}x{} cross-evaluation matrix to {}\n", names.size(),
                     names.size(), opt.out);
}

void VerifyToy(const VerifyToyOptions& opt, std::ostream& log) {
  if (opt.n < 2) Fail("--n must be >= 2");
  if (opt.samples < 1 || opt.profiles < 1) Fail("--samples and --profiles must be >= 1");
  std::vector<simplex::PureRewardProfile> profiles;
  if (opt.n == 3) {
    // Paper/scissors mixture (0, 2/3, 1/3): it earns 1/3 against rock and
    // paper and loses 2/3 against scissors.
    Eigen::VectorXd r(3);
    r << 1.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0;
    profiles.push_back({r});
  }
  Rng profile_rng(DeriveSeed(opt.seed, "profiles"));
  while (static_cast<int>(profiles.size()) < opt.profiles) {
    profiles.push_back(simplex::RandomSingleExploiterProfile(opt.n, profile_rng));
  }
  const simplex::ProportionalityReport report =
      simplex::ProportionalityCheck(profiles, opt.samples, DeriveSeed(opt.seed, "mc"));
  CsvTable table;
  table.comment = FileComment(opt.seed, "verify-toy");
  table.header = {"profile", "exploitability", "el", "ratio", "stderr", "conditioning_rate"};
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    std::string profile;
    for (int i = 0; i < profiles[k].size(); ++i) {
      if (i > 0) profile += ';';
      profile += FormatDouble(profiles[k].rewards(i));
    }
    table.rows.push_back({profile, FormatDouble(report.exploitability[k]),
                          FormatDouble(report.estimates[k].el),
                          FormatDouble(report.ratios[k]),
                          FormatDouble(report.estimates[k].std_error),
                          FormatDouble(report.estimates[k].conditioning_rate)});
  }
  if (!opt.out.empty()) {
    EnsureParent(opt.out);
    WriteCsv(opt.out, table);
  }
  if (opt.n == 3) {
    const auto& e = report.estimates.front();
    log << fmt::format(
        "worked example (0, 2/3, 1/3): E = {:.6f}, EL = {:.6f} +- {:.6f} "
        "(integrated value 2/9 = {:.6f}; the pyramid-centroid argument gives 1/6)\n",
        report.exploitability.front(), e.el, e.std_error, 2.0 / 9.0);
  }
  log << fmt::format(
      "n = {}: EL/E = {:.6f} +- {:.6f} over {} profiles (1/n = {:.6f}, 1/(n+1) = "
      "{:.6f}); max spread {:.4f}, max z {:.2f}\n",
      opt.n, report.pooled_ratio, report.pooled_std_error, profiles.size(),
      1.0 / opt.n, 1.0 / (opt.n + 1), report.max_relative_spread, report.max_z);
}

int VerifyProps(const VerifyPropsOptions& opt, std::ostream& log) {
  if (opt.trials < 1) Fail("--trials must be >= 1");
  Rng rng(DeriveSeed(opt.seed, "mixture-bound"));
  int p1_violations = 0;
  double p1_min_gap = std::numeric_limits<double>::infinity();
  for (int t = 0; t < opt.trials; ++t) {
    const int n = 2 + rng.UniformInt(5);
    const int k = 1 + rng.UniformInt(5);
    const games::MatrixGame game = simplex::RandomSymmetricZeroSumGame(n, rng);
    std::vector<games::MixedStrategy> support;
    for (int i = 0; i < k; ++i) support.push_back(simplex::RandomMixedStrategy(n, rng));
    const Eigen::VectorXd w = simplex::SampleUniformSimplex(std::max(k, 2), rng);
    std::vector<double> dist(w.data(), w.data() + k);
    double total = 0.0;
    for (double x : dist) total += x;
    for (double& x : dist) x /= total;
    const auto r = simplex::CheckMixtureBound(game, support, dist);
    if (!r.holds) ++p1_violations;
    p1_min_gap = std::min(p1_min_gap, r.lhs - r.rhs);
  }
  Rng rng2(DeriveSeed(opt.seed, "neighbourhood-bound"));
  const int p2_trials = std::max(1, opt.trials / 10);
  int p2_violations = 0;
  double p2_min_slack = std::numeric_limits<double>::infinity();
  for (int t = 0; t < p2_trials; ++t) {
    const auto inst = simplex::RandomNeighbourhoodInstance(rng2);
    const auto r = simplex::CheckNeighbourhoodBound(inst);
    if (r.el_bound_violation || r.reward_bound_violation) ++p2_violations;
    p2_min_slack = std::min(p2_min_slack, r.bound - r.max_el_delta);
  }
  CsvTable table;
  table.comment = FileComment(opt.seed, "verify-props");
  table.header = {"check", "trials", "violations", "min_slack"};
  table.rows.push_back({"mixture_exploitability_bound", std::to_string(opt.trials),
                        std::to_string(p1_violations), FormatDouble(p1_min_gap)});
  table.rows.push_back({"neighbourhood_el_bound", std::to_string(p2_trials),
                        std::to_string(p2_violations), FormatDouble(p2_min_slack)});
  if (!opt.out.empty()) {
    EnsureParent(opt.out);
    WriteCsv(opt.out, table);
  }
  log << fmt::format("mixture exploitability bound: {}/{} violations (min slack {:.3g})\n",
                     p1_violations, opt.trials, p1_min_gap);
  log << fmt::format("neighbourhood EL bound: {}/{} violations (min slack {:.3g})\n",
                     p2_violations, p2_trials, p2_min_slack);
  return p1_violations + p2_violations;
}

void ExportEmbeddings(const ExportEmbeddingsOptions& opt, std::ostream& log) {
  Require(opt.repr, "--repr");
  Require(opt.el, "--el");
  Require(opt.out, "--out");
  RequireFile(opt.repr, "representation file");
  RequireFile(opt.el, "EL file");
  const auto rows = pvrnn::ReadRepresentationCsv(opt.repr);
  const CsvTable el = ReadCsv(opt.el);
  const int gid = el.Column("game_id");
  const int pid = el.Column("player_index");
  const int reward = el.Column("reward");
  const int raw = el.Column("el_raw");
  const int scaled = el.Column("el_scaled");
  std::map<TrajectoryKey, const std::vector<std::string>*> el_rows;
  for (const auto& r : el.rows) {
    el_rows[{ParseInt(r[gid]), static_cast<int>(ParseInt(r[pid]))}] = &r;
  }
  std::set<TrajectoryKey> repr_keys;
  std::vector<std::string> orphans;
  for (const auto& r : rows) {
    repr_keys.insert(r.key);
    if (!el_rows.contains(r.key)) orphans.push_back("repr" + KeyString(r.key));
  }
  for (const auto& [k, _] : el_rows) {
    if (!repr_keys.contains(k)) orphans.push_back("el" + KeyString(k));
  }
  if (!orphans.empty()) {
    std::string list;
    for (std::size_t i = 0; i < orphans.size() && i < 10; ++i) {
      list += (i ? " " : "") + orphans[i];
    }
    Fail(fmt::format("{} keys present in only one input: {}{}", orphans.size(), list,
                     orphans.size() > 10 ? " ..." : ""));
  }
  CsvTable table;
  table.comment = FileComment(0, "export-embeddings");
  table.header = {"game_id", "player_index", "demonstrator_tag", "reward", "el_raw",
                  "el_scaled"};
  const Eigen::Index dim = rows.empty() ? 0 : rows.front().l.size();
  for (Eigen::Index k = 0; k < dim; ++k) table.header.push_back(fmt::format("l_{}", k));
  for (const auto& r : rows) {
    const auto& e = *el_rows.at(r.key);
    std::vector<std::string> out = {std::to_string(r.key.game_id),
                                    std::to_string(r.key.player_index), r.tag,
                                    e[reward], e[raw], e[scaled]};
    for (Eigen::Index k = 0; k < dim; ++k) out.push_back(FormatDouble(r.l(k)));
    table.rows.push_back(std::move(out));
  }
  EnsureParent(opt.out);
  WriteCsv(opt.out, table);
  log << fmt::format("wrote {} embedding rows to {}\n", rows.size(), opt.out);
}

// ---------------------------------------------------------------------------
// Pipeline

RunConfig::RunConfig() {
  values_ = {
      {"env", "rps"},
      {"rounds", "100"},
      {"games", "1500"},
      {"pool", "uniform:0:1,biased:0.2:1,biased:0.5:1"},
      {"seed", "0"},
      {"out_dir", "ela_run"},
      {"data", ""},
      {"repr_epochs", "100"},
      {"batch_size", "32"},
      {"z_dim", "8"},
      {"h_dim", "8"},
      {"r_dim", "8"},
      {"l_dim", "8"},
      {"lr", "0.0005"},
      {"repr_lr", FormatDouble(kDefaultReprLr)},
      {"el_epochs", "500"},
      {"el_hidden", "32"},
      {"el_lr", "0.001"},
      {"policy_epochs", "300"},
      {"minibatches", "50"},
      {"policy_hidden", "256"},
      {"policy_lr", "0.0005"},
      {"thresholds", "0.2;0.4;0.6;0.8;1.0"},
      {"eval_games", "500"},
  };
}

RunConfig RunConfig::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(fmt::format("cannot open config '{}'", path));
  RunConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    try {
      config.SetAssignment(line);
    } catch (const Error& e) {
      Fail(fmt::format("{}:{}: {}", path, number, e.what()));
    }
  }
  return config;
}

namespace {
std::string Trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}
}  // namespace

void RunConfig::Set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) Fail(fmt::format("unknown config key '{}'", key));
  values_[key] = value;
}

void RunConfig::SetAssignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    Fail(fmt::format("expected key=value, got '{}'", assignment));
  }
  Set(Trim(assignment.substr(0, eq)), Trim(assignment.substr(eq + 1)));
}

const std::string& RunConfig::Get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) Fail(fmt::format("unknown config key '{}'", key));
  return it->second;
}

std::int64_t RunConfig::GetInt(const std::string& key) const {
  try {
    return ParseInt(Get(key));
  } catch (const Error&) {
    Fail(fmt::format("config key '{}' must be an integer, got '{}'", key, Get(key)));
  }
}

double RunConfig::GetDouble(const std::string& key) const {
  try {
    return ParseDouble(Get(key));
  } catch (const Error&) {
    Fail(fmt::format("config key '{}' must be a number, got '{}'", key, Get(key)));
  }
}

std::vector<double> RunConfig::GetDoubleList(const std::string& key) const {
  std::vector<double> out;
  std::string item;
  const std::string& raw = Get(key);
  for (std::size_t i = 0; i <= raw.size(); ++i) {
    if (i == raw.size() || raw[i] == ';') {
      item = Trim(item);
      if (!item.empty()) {
        try {
          out.push_back(ParseDouble(item));
        } catch (const Error&) {
          Fail(fmt::format("config key '{}': bad number '{}'", key, item));
        }
      }
      item.clear();
    } else {
      item += raw[i];
    }
  }
  if (out.empty()) Fail(fmt::format("config key '{}' is empty", key));
  return out;
}

std::string RunConfig::Serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += fmt::format("{}={}\n", k, v);
  return out;
}

namespace {

template <typename F>
auto Stage(const std::string& name, std::ostream& log, F&& body) {
  log << fmt::format("[{}]\n", name);
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

int ToInt(std::int64_t v, std::string_view key) {
  if (v < 1 || v > std::numeric_limits<int>::max()) {
    Fail(fmt::format("config key '{}' must be a positive integer", key));
  }
  return static_cast<int>(v);
}

}  // namespace

PipelineResult RunPipeline(const RunConfig& config, std::ostream& log) {
  PipelineResult result;
  // Everything that can be validated without doing work is checked first.
  const auto [master, env, pool, repr_hyper, el_hyper, policy_hyper, grid,
              eval_games, games] = Stage("config", log, [&] {
    const std::uint64_t seed = static_cast<std::uint64_t>(config.GetInt("seed"));
    const games::EnvKind kind = games::ParseEnvKind(config.Get("env"));
    const games::EnvConfig env_cfg{kind, ToInt(config.GetInt("rounds"), "rounds")};
    games::DemonstratorPool demo_pool = games::ParsePoolSpec(kind, config.Get("pool"));
    pvrnn::PvrnnHyper rh;
    rh.z_dim = ToInt(config.GetInt("z_dim"), "z_dim");
    rh.h_dim = ToInt(config.GetInt("h_dim"), "h_dim");
    rh.r_dim = ToInt(config.GetInt("r_dim"), "r_dim");
    rh.l_dim = ToInt(config.GetInt("l_dim"), "l_dim");
    rh.epochs = ToInt(config.GetInt("repr_epochs"), "repr_epochs");
    rh.batch_size = ToInt(config.GetInt("batch_size"), "batch_size");
    rh.lr = config.GetDouble("lr");
    rh.repr_lr = config.GetDouble("repr_lr");
    rh.Validate();
    el::ElHyper eh;
    eh.hidden = ToInt(config.GetInt("el_hidden"), "el_hidden");
    eh.epochs = ToInt(config.GetInt("el_epochs"), "el_epochs");
    eh.lr = config.GetDouble("el_lr");
    ol::PolicyHyper ph;
    ph.hidden = ToInt(config.GetInt("policy_hidden"), "policy_hidden");
    ph.epochs = ToInt(config.GetInt("policy_epochs"), "policy_epochs");
    ph.minibatches = ToInt(config.GetInt("minibatches"), "minibatches");
    ph.lr = config.GetDouble("policy_lr");
    std::vector<double> thresholds = config.GetDoubleList("thresholds");
    for (double t : thresholds) {
      if (!(t >= 0.0 && t <= 1.0)) Fail(fmt::format("threshold {} outside [0, 1]", t));
    }
    const std::int64_t n_eval = ToInt(config.GetInt("eval_games"), "eval_games");
    const std::int64_t n_games = ToInt(config.GetInt("games"), "games");
    return std::make_tuple(seed, env_cfg, std::move(demo_pool), rh, eh, ph,
                           std::move(thresholds), n_eval, n_games);
  });

  const fs::path out_dir = config.Get("out_dir");
  result.out_dir = out_dir.string();
  Stage("setup", log, [&] {
    fs::create_directories(out_dir / "policies");
    fs::remove(out_dir / "FAILED");
    std::ofstream(out_dir / "config.resolved") << config.Serialize();
  });
  const auto path = [&](const std::string& name) { return (out_dir / name).string(); };
  auto& artifacts = result.artifacts;
  artifacts.push_back("config.resolved");

  try {
    Stage("gen-data", log, [&] {
      const std::string source = config.Get("data");
      if (!source.empty()) {
        if (!fs::exists(source)) Fail(fmt::format("dataset '{}' does not exist", source));
        const games::Dataset d = games::LoadDataset(source);
        if (d.meta.env != games::EnvName(env.kind)) {
          Fail(fmt::format("dataset '{}' is for env '{}', config says '{}'", source,
                           d.meta.env, games::EnvName(env.kind)));
        }
        games::SaveDataset(d, path("data.jsonl"));
        log << fmt::format("copied {} trajectories from {}\n", d.trajectories.size(),
                           source);
        return;
      }
      GenData({games::EnvName(env.kind), games, config.Get("pool"), env.rps_rounds,
               DeriveSeed(master, "data"), path("data.jsonl")},
              log);
    });
    artifacts.push_back("data.jsonl");

    Stage("train-repr", log, [&] {
      TrainRepr({path("data.jsonl"), repr_hyper, DeriveSeed(master, "model"),
                 path("pvrnn.ckpt.json"), path("repr.csv")},
                log);
    });
    artifacts.push_back("pvrnn.ckpt.json");
    artifacts.push_back("repr.csv");

    Stage("estimate-el", log, [&] {
      EstimateElOptions opt;
      opt.model = path("el_model.ckpt.json");
      opt.repr = path("repr.csv");
      opt.data = path("data.jsonl");
      opt.out = path("el.csv");
      opt.hyper = el_hyper;
      opt.seed = DeriveSeed(master, "el");
      EstimateEl(opt, log);
    });
    artifacts.push_back("el_model.ckpt.json");
    artifacts.push_back("el.csv");

    const std::uint64_t policy_seed = DeriveSeed(master, "policy");
    const std::uint64_t eval_seed = DeriveSeed(master, "eval");
    const games::Dataset dataset = games::LoadDataset(path("data.jsonl"));
    const ol::ElAssignment scaled = ReadScaledEl(path("el.csv"));

    const ol::ThresholdSearch search = Stage("threshold-search", log, [&] {
      ol::ThresholdSearch s = ol::SearchThreshold(dataset, scaled, grid, pool, env,
                                                  policy_hyper, policy_seed, eval_games);
      CsvTable table;
      table.comment = FileComment(policy_seed, "threshold-search");
      table.header = {"threshold", "kept", "supported_exploitability"};
      for (const auto& t : s.trials) {
        table.rows.push_back({FormatDouble(t.threshold), std::to_string(t.kept),
                              FormatDouble(t.supported_exploitability)});
        log << fmt::format("threshold {:.2f}: kept {} exploitability {:.6f}\n",
                           t.threshold, t.kept, t.supported_exploitability);
      }
      WriteCsv(path("threshold_search.csv"), table);
      return s;
    });
    artifacts.push_back("threshold_search.csv");
    result.ela_threshold = search.best_threshold;

    struct Variant {
      std::string name;
      std::string filter;
      double thresh;
      double* slot;
    };
    const std::vector<Variant> variants = {
        {"bc", "none", 1.0, &result.bc_exploitability},
        {"wt", "wt", 1.0, &result.wt_exploitability},
        {"ela", "ela", search.best_threshold, &result.ela_exploitability},
    };
    CsvTable summary;
    summary.comment = FileComment(master, "run-pipeline");
    summary.header = {"method", "threshold", "supported_exploitability", "exact"};
    for (const auto& v : variants) {
      Stage("train-policy:" + v.name, log, [&] {
        TrainPolicyOptions opt;
        opt.data = path("data.jsonl");
        opt.filter = v.filter;
        opt.el = path("el.csv");
        opt.thresh = v.thresh;
        opt.hyper = policy_hyper;
        opt.seed = policy_seed;
        opt.out = path("policies/" + v.name + ".ckpt.json");
        TrainPolicy(opt, log);
        const ol::Policy policy = ol::LoadPolicy(opt.out);
        const ol::SupportedExploitability se = ol::ComputeSupportedExploitability(
            policy, pool, env, eval_games, eval_seed);
        *v.slot = se.value;
        summary.rows.push_back({v.name, FormatDouble(v.thresh), FormatDouble(se.value),
                                se.exact ? "true" : "false"});
        log << fmt::format("{} supported exploitability {:.6f}\n", v.name, se.value);
      });
      artifacts.push_back("policies/" + v.name + ".ckpt.json");
    }
    Stage("summary", log, [&] { WriteCsv(path("summary.csv"), summary); });
    artifacts.push_back("summary.csv");

    Stage("cross-eval", log, [&] {
      CrossEval({path("policies"), eval_games, eval_seed, path("cross_eval.csv")}, log);
    });
    artifacts.push_back("cross_eval.csv");

    Stage("export-embeddings", log, [&] {
      ExportEmbeddings({path("repr.csv"), path("el.csv"), path("embeddings.csv")}, log);
    });
    artifacts.push_back("embeddings.csv");

    Stage("manifest", log, [&] {
      CsvTable manifest;
      manifest.comment = FileComment(master, "run-pipeline");
      manifest.header = {"file", "bytes", "fnv1a"};
      for (const auto& a : artifacts) {
        manifest.rows.push_back({a, std::to_string(fs::file_size(out_dir / a)),
                                 HashFile(path(a))});
      }
      WriteCsv(path("manifest.csv"), manifest);
    });
    artifacts.push_back("manifest.csv");
  } catch (const StageError& e) {
    std::ofstream(out_dir / "FAILED") << e.stage() << ": " << e.what() << "\n";
    throw;
  }
  return result;
}

}  // namespace ela::cli
