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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
//   acceptance [--only 1,5,10] [--workdir DIR] [--seeds 3]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ela/cli/commands.h"
#include "ela/common/csv.h"
#include "ela/games/demonstrators.h"
#include "ela/games/env.h"
#include "ela/games/kuhn.h"
#include "ela/games/trajectory.h"
#include "ela/simplex/bounds.h"
#include "ela/simplex/simplex.h"
#include "grad_suite.h"
#include "oracles.h"

namespace ela::acceptance {
namespace {

namespace fs = std::filesystem;

constexpr char kPool[] = "uniform:0:1,biased:0.2:1,biased:0.5:1";

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Outcome WorkedExample() {
  Clock clock;
  const simplex::PureRewardProfile profile{Eigen::Vector3d(1.0 / 3, 1.0 / 3, -2.0 / 3)};
  const double e = profile.Exploitability();
  Rng rng(DeriveSeed(1, "worked-example"));
  const simplex::ElEstimate est = simplex::ElMonteCarlo(profile, 1000000, rng);
  const double closed_form = 2.0 / 9.0;
  const double z = std::abs(est.el - closed_form) / est.std_error;
  const double secs = clock.Seconds();
  std::cout << fmt::format(
      "  note: the integral gives EL = 2/9 = {:.6f}; the pyramid-centroid value 1/6 = {:.6f} "
      "averages at the wrong centroid and is off by {:.6f}\n",
      closed_form, 1.0 / 6.0, closed_form - 1.0 / 6.0);
  return {e == 2.0 / 3.0 && z <= 3.0 && secs < 10.0,
          fmt::format("E = {} (exact 2/3: {}), EL = {:.6f} +- {:.6f} vs 2/9, |z| = {:.2f}, "
                      "{:.1f} s",
                      e, e == 2.0 / 3.0 ? "yes" : "no", est.el, est.std_error, z, secs)};
}

Outcome Proportionality() {
  Clock clock;
  bool ok = true;
  std::string detail;
  for (const auto& [n, count] : {std::pair{3, 50}, std::pair{4, 20}}) {
    Rng draw(DeriveSeed(2, static_cast<std::uint64_t>(n)));
    std::vector<simplex::PureRewardProfile> profiles;
    for (int k = 0; k < count; ++k) {
      profiles.push_back(simplex::RandomSingleExploiterProfile(n, draw));
    }
    const auto r = simplex::ProportionalityCheck(profiles, 1000000,
                                                 DeriveSeed(2, fmt::format("mc{}", n)));
    ok = ok && r.max_z <= 3.0;
    detail += fmt::format("n={}: EL/E = {:.5f} +- {:.5f} over {} profiles, max z {:.2f}; ",
                          n, r.pooled_ratio, r.pooled_std_error, count, r.max_z);
  }
  const double secs = clock.Seconds();
  return {ok && secs < 60.0, detail + fmt::format("{:.1f} s", secs)};
}

Outcome MixtureBound() {
  Clock clock;
  std::ostringstream log;
  const int violations = cli::VerifyProps({1000, 3, ""}, log);
  // VerifyProps also runs the neighbourhood check; count only the first line.
  Rng rng(DeriveSeed(3, "mixture-bound"));
  int p1 = 0;
  double min_gap = 1e300;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + rng.UniformInt(5);
    const int k = 1 + rng.UniformInt(5);
    const auto game = simplex::RandomSymmetricZeroSumGame(n, rng);
    std::vector<games::MixedStrategy> support;
    for (int i = 0; i < k; ++i) support.push_back(simplex::RandomMixedStrategy(n, rng));
    const Eigen::VectorXd w = simplex::SampleUniformSimplex(std::max(k, 2), rng);
    std::vector<double> dist(w.data(), w.data() + k);
    double total = 0.0;
    for (double x : dist) total += x;
    for (double& x : dist) x /= total;
    double lhs = 0.0;
    for (int i = 0; i < k; ++i) lhs += dist[i] * games::Exploitability(game, support[i]);
    const double rhs = games::Exploitability(game, simplex::Mix(support, dist));
    if (!(lhs >= rhs - 1e-9)) ++p1;
    min_gap = std::min(min_gap, lhs - rhs);
  }
  const double secs = clock.Seconds();
  return {p1 == 0 && violations == 0 && secs < 30.0,
          fmt::format("1000 instances, {} violations (min slack {:.3g}); CLI check reports "
                      "{} total; {:.1f} s",
                      p1, min_gap, violations, secs)};
}

Outcome NeighbourhoodBound() {
  Clock clock;
  Rng rng(DeriveSeed(4, "neighbourhood-bound"));
  int violations = 0;
  double min_slack = 1e300;
  for (int t = 0; t < 100; ++t) {
    const auto inst = t % 10 == 0 ? simplex::RpsNeighbourhoodInstance(0.05 * (t / 10 + 1), rng)
                                   : simplex::RandomNeighbourhoodInstance(rng);
    const auto r = simplex::CheckNeighbourhoodBound(inst);
    // Strict inequality, evaluated with the exploiters' exact conditioned losses.
    if (!(r.max_el_delta < r.bound) || r.el_bound_violation) ++violations;
    min_slack = std::min(min_slack, r.bound - r.max_el_delta);
  }
  const double secs = clock.Seconds();
  return {violations == 0 && secs < 30.0,
          fmt::format("100 instances, {} violations (min slack {:.3g}); {:.1f} s", violations,
                      min_slack, secs)};
}

Outcome Gradients() {
  Clock clock;
  bool ok = true;
  int checked = 0;
  std::string failed;
  double worst = 0.0;
  auto reports = testing::NnGradientSuite(20, 5);
  reports.push_back(testing::PvrnnTrajectoryGradient(20, 5));
  for (const auto& r : reports) {
    checked += r.report.checked;
    worst = std::max(worst, r.report.worst_rel_error);
    if (!r.report.ok()) {
      ok = false;
      failed += fmt::format(" {} ({})", r.name, r.report.first_failure);
    }
  }
  const double secs = clock.Seconds();
  return {ok && secs < 60.0,
          fmt::format("{} checks, 20 configs x {} targets, worst relative error {:.2e}, "
                      "{:.1f} s{}",
                      checked, reports.size(), worst, secs,
                      failed.empty() ? "" : "; failing:" + failed)};
}

// ---------------------------------------------------------------------------
// Criteria 6-8 share full pipeline runs, one per seed.

struct SeedRun {
  std::uint64_t seed = 0;
  fs::path dir;
  cli::PipelineResult result;
};

SeedRun RunSeed(const fs::path& workdir, std::uint64_t seed) {
  SeedRun run;
  run.seed = seed;
  run.dir = workdir / fmt::format("seed{}", seed);
  cli::RunConfig config;
  config.Set("env", "rps");
  config.Set("rounds", "100");
  config.Set("games", "1500");
  config.Set("pool", kPool);
  config.Set("seed", std::to_string(seed));
  config.Set("out_dir", run.dir.string());
  std::ofstream log(workdir / fmt::format("seed{}.log", seed));
  log << std::unitbuf;
  Clock clock;
  run.result = cli::RunPipeline(config, log);
  std::cout << fmt::format("  pipeline seed {} finished in {:.0f} s\n", seed, clock.Seconds());
  return run;
}

// Bias level of a demonstrator tag: "uniform" -> 0, "rock@0.2" -> 0.2.
double BiasOf(const std::string& tag) {
  if (tag == "uniform") return 0.0;
  const auto at = tag.find('@');
  if (at == std::string::npos) throw std::runtime_error("unexpected tag " + tag);
  return ParseDouble(tag.substr(at + 1));
}

int ClassOf(double bias) { return bias == 0.0 ? 0 : (bias < 0.35 ? 1 : 2); }

Outcome RepresentationQuality(const SeedRun& run) {
  const CsvTable repr = ReadCsv((run.dir / "repr.csv").string());
  const int gid = repr.Column("game_id");
  const int tag = repr.Column("demonstrator_tag");
  const int first = repr.Column("l_0");
  const int dim = static_cast<int>(repr.header.size()) - first;
  // Every fifth game is held out; the rest are the neighbour pool.
  std::vector<std::vector<double>> train_rows, test_rows;
  std::vector<int> train_labels, test_labels;
  for (const auto& row : repr.rows) {
    std::vector<double> l;
    for (int k = 0; k < dim; ++k) l.push_back(ParseDouble(row[first + k]));
    const int label = ClassOf(BiasOf(row[tag]));
    if (ParseInt(row[gid]) % 5 == 0) {
      test_rows.push_back(l);
      test_labels.push_back(label);
    } else {
      train_rows.push_back(l);
      train_labels.push_back(label);
    }
  }
  const auto to_matrix = [dim](const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (int k = 0; k < dim; ++k) m(static_cast<Eigen::Index>(i), k) = rows[i][k];
    }
    return m;
  };
  const double acc = testing::KnnAccuracy(to_matrix(train_rows), train_labels,
                                          to_matrix(test_rows), test_labels, 5);
  return {acc >= 0.8, fmt::format("5-NN held-out accuracy {:.4f} on {} trajectories "
                                  "({} reference), chance 1/3",
                                  acc, test_rows.size(), train_rows.size())};
}

Outcome ElFidelity(const SeedRun& run) {
  const CsvTable el = ReadCsv((run.dir / "el.csv").string());
  const int tag = el.Column("demonstrator_tag");
  const int scaled = el.Column("el_scaled");
  std::vector<double> oracle, learned;
  std::map<double, std::pair<double, int>> by_level;
  for (const auto& row : el.rows) {
    const double p = BiasOf(row[tag]);  // the demonstrator's exploitability
    const double v = ParseDouble(row[scaled]);
    oracle.push_back(p);
    learned.push_back(v);
    by_level[p].first += v;
    by_level[p].second += 1;
  }
  const double rho = testing::SpearmanCorrelation(learned, oracle);
  std::vector<double> means;
  std::string levels;
  for (const auto& [p, acc] : by_level) {
    means.push_back(acc.first / acc.second);
    levels += fmt::format(" p={}: {:.4f}", p, means.back());
  }
  bool increasing = means.size() == 3;
  for (std::size_t i = 1; i < means.size(); ++i) increasing = increasing && means[i] > means[i - 1];
  return {rho >= 0.8 && increasing,
          fmt::format("Spearman {:.4f}; mean scaled EL{} ({})", rho, levels,
                      increasing ? "strictly increasing" : "NOT strictly increasing")};
}

Outcome ElaImprovement(const std::vector<SeedRun>& runs) {
  int ela_le_bc = 0;
  double ela_sum = 0.0, wt_sum = 0.0;
  std::string detail;
  for (const auto& r : runs) {
    const auto& p = r.result;
    if (p.ela_exploitability <= p.bc_exploitability) ++ela_le_bc;
    ela_sum += p.ela_exploitability;
    wt_sum += p.wt_exploitability;
    detail += fmt::format("seed {}: BC {:.6f} WT {:.6f} ELA {:.6f} (t={}); ", r.seed,
                          p.bc_exploitability, p.wt_exploitability, p.ela_exploitability,
                          p.ela_threshold);
  }
  const double n = static_cast<double>(runs.size());
  const bool bc_ok = 3 * ela_le_bc >= 2 * static_cast<int>(runs.size());
  const bool wt_ok = ela_sum / n <= wt_sum / n;
  return {bc_ok && wt_ok,
          detail + fmt::format("ELA <= BC in {}/{} seeds ({}); mean ELA {:.6f} vs mean WT "
                               "{:.6f} ({})",
                               ela_le_bc, runs.size(), bc_ok ? "ok" : "not met",
                               ela_sum / n, wt_sum / n, wt_ok ? "ok" : "not met")};
}

// ---------------------------------------------------------------------------

int Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::RunCli(args, out, err);
  if (code != 0) {
    std::string joined;
    for (const auto& a : args) joined += " " + a;
    throw std::runtime_error(fmt::format("'ela{}' exited {}: {}", joined, code, err.str()));
  }
  return code;
}

Outcome ReductionInvariant(const fs::path& workdir) {
  const fs::path d = workdir / "reduction";
  fs::create_directories(d);
  const auto p = [&](const char* name) { return (d / name).string(); };
  Cli({"gen-data", "--env", "rps", "--games", "200", "--rounds", "30", "--pool", kPool,
       "--seed", "9", "--out", p("data.jsonl")});
  Cli({"train-repr", "--data", p("data.jsonl"), "--epochs", "3", "--seed", "9", "--out-model",
       p("pvrnn.json"), "--out-repr", p("repr.csv")});
  Cli({"estimate-el", "--model", p("el.json"), "--repr", p("repr.csv"), "--data",
       p("data.jsonl"), "--epochs", "20", "--seed", "9", "--out", p("el.csv")});
  const std::vector<std::string> common = {"--data", p("data.jsonl"), "--epochs", "20",
                                           "--seed", "9"};
  auto ela = common, none = common;
  ela.insert(ela.begin(), "train-policy");
  ela.insert(ela.end(), {"--filter", "ela", "--el", p("el.csv"), "--thresh", "1.0", "--out",
                         p("ela.json"), "--out-data", p("filtered.jsonl")});
  none.insert(none.begin(), "train-policy");
  none.insert(none.end(), {"--filter", "none", "--out", p("bc.json")});
  Cli(ela);
  Cli(none);
  const bool data_same = Slurp(d / "filtered.jsonl") == Slurp(d / "data.jsonl");
  const bool ckpt_same = Slurp(d / "ela.json") == Slurp(d / "bc.json");
  return {data_same && ckpt_same,
          fmt::format("filtered dataset byte-identical: {}; policy checkpoint identical to "
                      "unfiltered BC: {}",
                      data_same ? "yes" : "no", ckpt_same ? "yes" : "no")};
}

Outcome KuhnOracle() {
  const auto nash = games::KuhnNashStrategy(1.0 / 6.0);
  const double expl = games::KuhnExploitability(nash, nash);
  const double brute = 0.5 * (testing::KuhnBruteForceBestResponse(nash, 0) +
                               testing::KuhnBruteForceBestResponse(nash, 1));
  const double value = testing::KuhnTreeValue(nash, nash);
  const double lib_value = games::KuhnExpectedValue(nash, nash);
  Rng rng(DeriveSeed(10, "kuhn-mc"));
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto [t0, t1] = games::PlayEpisode({games::EnvKind::kKuhn, 0}, nash, nash, rng);
    sum += t0.reward;
    sq += t0.reward * t0.reward;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  const double z = std::abs(mean - value) / se;
  const bool ok = expl <= 1e-9 && brute <= 1e-9 && std::abs(value + 1.0 / 18.0) <= 1e-12 &&
                  std::abs(lib_value - value) <= 1e-12 && z <= 3.0;
  return {ok, fmt::format("exploitability {:.2e} (brute force {:.2e}), value {:.12f} vs "
                          "-1/18 = {:.12f}, Monte-Carlo {:.5f} +- {:.5f} at 1e5 episodes "
                          "(|z| = {:.2f})",
                          expl, brute, value, -1.0 / 18.0, mean, se, z)};
}

Outcome Determinism(const fs::path& workdir) {
  // Each command runs twice into separate directories; every primary output
  // must match byte for byte.
  const fs::path base = workdir / "determinism";
  fs::remove_all(base);
  std::vector<std::string> mismatched;
  int compared = 0;
  for (const char* run : {"a", "b"}) {
    const fs::path d = base / run;
    fs::create_directories(d / "models");
    const auto p = [&](const std::string& name) { return (d / name).string(); };
    Cli({"gen-data", "--env", "rps", "--games", "60", "--rounds", "20", "--pool", kPool,
         "--seed", "3", "--out", p("data.jsonl")});
    Cli({"gen-data", "--env", "kuhn", "--games", "60", "--pool", "nash:0.2:1,uniform:0:1",
         "--seed", "3", "--out", p("kuhn.jsonl")});
    Cli({"train-repr", "--data", p("data.jsonl"), "--epochs", "2", "--seed", "3",
         "--out-model", p("pvrnn.json"), "--out-repr", p("repr.csv")});
    Cli({"infer-repr", "--data", p("data.jsonl"), "--model", p("pvrnn.json"), "--seed", "3",
         "--out-repr", p("inferred.csv")});
    Cli({"estimate-el", "--model", p("el.json"), "--repr", p("repr.csv"), "--data",
         p("data.jsonl"), "--epochs", "10", "--seed", "3", "--out", p("el.csv")});
    Cli({"el-delta", "--repr", p("repr.csv"), "--data", p("data.jsonl"), "--out",
         p("el_delta.csv")});
    Cli({"train-policy", "--data", p("data.jsonl"), "--filter", "ela", "--el", p("el.csv"),
         "--thresh", "0.6", "--epochs", "3", "--seed", "3", "--out", p("models/ela.json"),
         "--out-data", p("filtered.jsonl")});
    Cli({"train-policy", "--data", p("data.jsonl"), "--filter", "wt", "--epochs", "3",
         "--seed", "3", "--out", p("models/wt.json")});
    Cli({"evaluate", "--a", p("models/ela.json"), "--b", p("models/wt.json"), "--games", "50",
         "--seed", "3", "--out", p("eval.csv")});
    Cli({"evaluate", "--a", p("models/ela.json"), "--b", std::string("pool:") + kPool,
         "--games", "50", "--seed", "3", "--out", p("eval_pool.csv")});
    Cli({"cross-eval", "--models", p("models"), "--games", "20", "--seed", "3", "--out",
         p("cross.csv")});
    Cli({"verify-toy", "--samples", "20000", "--profiles", "5", "--seed", "3", "--out",
         p("toy.csv")});
    Cli({"verify-props", "--trials", "50", "--seed", "3", "--out", p("props.csv")});
    Cli({"export-embeddings", "--repr", p("repr.csv"), "--el", p("el.csv"), "--out",
         p("embeddings.csv")});
  }
  for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), base / "a");
    ++compared;
    if (Slurp(entry.path()) != Slurp(base / "b" / rel)) mismatched.push_back(rel.string());
  }
  // The pipeline writes its output directory into config.resolved, so it is
  // rerun in place and every artifact compared.
  std::map<std::string, std::string> first;
  for (int rep = 0; rep < 2; ++rep) {
    cli::RunConfig c;
    for (const auto& [k, v] : std::map<std::string, std::string>{
             {"games", "50"}, {"rounds", "20"}, {"repr_epochs", "2"}, {"el_epochs", "5"},
             {"policy_epochs", "2"}, {"thresholds", "0.5;1.0"}, {"eval_games", "50"},
             {"seed", "3"}, {"out_dir", (base / "pipeline").string()}}) {
      c.Set(k, v);
    }
    std::ostringstream log;
    cli::RunPipeline(c, log);
    for (const auto& entry : fs::recursive_directory_iterator(base / "pipeline")) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), base / "pipeline").string();
      if (rep == 0) {
        first[rel] = Slurp(entry.path());
      } else {
        ++compared;
        if (first[rel] != Slurp(entry.path())) mismatched.push_back("pipeline/" + rel);
      }
    }
  }
  std::string list;
  for (const auto& m : mismatched) list += " " + m;
  return {mismatched.empty() && compared >= 20,
          fmt::format("{} files compared across 12 commands and run-pipeline, {} differ{}",
                      compared, mismatched.size(), list)};
}

}  // namespace
}  // namespace ela::acceptance

int main(int argc, char** argv) {
  using namespace ela::acceptance;
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::string workdir = (fs::temp_directory_path() / "ela_acceptance").string();
  int seeds = 3;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--workdir", workdir, "Scratch directory");
  app.add_option("--seeds", seeds, "Pipeline seeds for the improvement check")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  const auto wanted = [&](int c) {
    return only.empty() || std::find(only.begin(), only.end(), c) != only.end();
  };
  fs::create_directories(workdir);

  std::map<int, Outcome> outcomes;
  const auto run = [&](int c, const std::function<Outcome()>& f) {
    if (!wanted(c)) return;
    try {
      outcomes[c] = f();
    } catch (const std::exception& e) {
      outcomes[c] = {false, std::string("error: ") + e.what()};
    }
    std::cout << fmt::format("{} criterion {}: {}\n", outcomes[c].pass ? "PASS" : "FAIL", c,
                             outcomes[c].detail)
              << std::flush;
  };

  run(1, WorkedExample);
  run(2, Proportionality);
  run(3, MixtureBound);
  run(4, NeighbourhoodBound);
  run(5, Gradients);
  run(9, [&] { return ReductionInvariant(workdir); });
  run(10, KuhnOracle);
  run(11, [&] { return Determinism(workdir); });

  if (wanted(6) || wanted(7) || wanted(8)) {
    std::vector<SeedRun> runs;
    std::string error;
    try {
      const int n = wanted(8) ? seeds : 1;
      for (int s = 0; s < n; ++s) runs.push_back(RunSeed(workdir, static_cast<std::uint64_t>(s)));
    } catch (const std::exception& e) {
      error = e.what();
    }
    const auto need = [&](std::size_t k) -> std::function<Outcome()> {
      return [&, k]() -> Outcome {
        if (runs.size() < k) return {false, "pipeline failed: " + error};
        return {};
      };
    };
    run(6, [&] { return runs.empty() ? need(1)() : RepresentationQuality(runs[0]); });
    run(7, [&] { return runs.empty() ? need(1)() : ElFidelity(runs[0]); });
    run(8, [&] {
      return runs.size() < static_cast<std::size_t>(seeds) ? need(seeds)()
                                                           : ElaImprovement(runs);
    });
  }

  int failed = 0;
  for (const auto& [c, o] : outcomes) failed += o.pass ? 0 : 1;
  std::cout << fmt::format("{}/{} criteria passed\n", outcomes.size() - failed, outcomes.size());
  return failed == 0 ? 0 : 1;
}
