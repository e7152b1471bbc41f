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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "ela/common/error.h"
#include "ela/games/demonstrators.h"
#include "ela/games/kuhn.h"
#include "ela/games/matrix_game.h"
#include "ela/games/rps.h"
#include "ela/ol/offline.h"
#include "oracles.h"

namespace ela::ol {
namespace {

using games::EnvKind;

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PolicyHyper TinyHyper() {
  PolicyHyper h;
  h.hidden = 16;
  h.epochs = 40;
  h.minibatches = 4;
  h.lr = 1e-2;
  return h;
}

games::Dataset RpsData(const std::string& pool, int games, int rounds, std::uint64_t seed) {
  return games::GenerateDataset(games::ParsePoolSpec(EnvKind::kRps, pool), games,
                                {EnvKind::kRps, rounds}, seed);
}

TEST(Filter, ModesAndInclusiveThreshold) {
  const games::Dataset d = RpsData("uniform:0:1,biased:0.5:1", 20, 5, 1);
  ElAssignment el;
  for (const auto& t : d.trajectories) {
    el[games::KeyOf(t)] = (t.game_id % 5) / 4.0;  // 0, .25, .5, .75, 1
  }
  EXPECT_EQ(FilterDataset(d, nullptr, {FilterMode::kNone, 1.0}), d);
  const games::Dataset wt = FilterDataset(d, nullptr, {FilterMode::kWt, 1.0});
  for (const auto& t : wt.trajectories) EXPECT_GT(t.reward, 0.0);
  std::size_t winners = 0;
  for (const auto& t : d.trajectories) winners += t.reward > 0.0;
  EXPECT_EQ(wt.trajectories.size(), winners);
  const games::Dataset half = FilterDataset(d, &el, {FilterMode::kEla, 0.5});
  for (const auto& t : half.trajectories) EXPECT_LE(el.at(games::KeyOf(t)), 0.5);
  EXPECT_EQ(half.trajectories.size(), 24u);  // three of every five games kept
  EXPECT_EQ(FilterDataset(d, &el, {FilterMode::kEla, 1.0}), d);
}

TEST(Filter, Errors) {
  const games::Dataset d = RpsData("uniform:0:1", 4, 3, 2);
  ElAssignment el;
  for (const auto& t : d.trajectories) el[games::KeyOf(t)] = 0.7;
  EXPECT_THROW(FilterDataset(d, &el, {FilterMode::kEla, 0.5}), Error);
  EXPECT_THROW(FilterDataset(d, &el, {FilterMode::kEla, 1.5}), Error);
  EXPECT_THROW(FilterDataset(d, nullptr, {FilterMode::kEla, 0.5}), Error);
  el.erase(el.begin());
  EXPECT_THROW(FilterDataset(d, &el, {FilterMode::kEla, 1.0}), Error);
  EXPECT_THROW(ParseFilterMode("best"), Error);
  EXPECT_EQ(ParseFilterMode(FilterModeName(FilterMode::kWt)), FilterMode::kWt);
}

TEST(Bc, RecoversStationaryDemonstrator) {
  const games::Dataset d = RpsData("rock:0.7:1", 60, 20, 3);
  PolicyHyper h = TinyHyper();
  h.epochs = 200;
  const BcResult r = TrainBc(d, h, 4);
  // The maximum-likelihood fit is the empirical action frequency of each
  // observation.
  std::map<std::string, std::vector<double>> freq;
  for (const auto& t : d.trajectories) {
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const std::string key = k == 0 ? "start" : games::RpsActionName(
          static_cast<int>(std::max_element(t.steps[k].obs.begin(), t.steps[k].obs.begin() + 3) -
                           t.steps[k].obs.begin()));
      auto& f = freq.try_emplace(key, std::vector<double>(3, 0.0)).first->second;
      f[t.steps[k].action] += 1.0;
    }
  }
  for (int prev = -1; prev < 3; ++prev) {
    const auto obs = games::RpsObservation(prev);
    std::vector<double> f = freq.at(obs.key);
    const double n = f[0] + f[1] + f[2];
    const std::vector<double> p = r.policy.ActionProbs(obs);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(p[a], f[a] / n, 0.02) << obs.key;
  }
  EXPECT_GT(r.epoch_log_likelihood.back(), r.epoch_log_likelihood.front());
}

TEST(Bc, SameSeedSameCheckpointBytes) {
  const games::Dataset d = RpsData("uniform:0:1,biased:0.2:1", 10, 10, 5);
  const std::string a = TempPath("ela_bc_a.json"), b = TempPath("ela_bc_b.json");
  SavePolicy(a, TrainBc(d, TinyHyper(), 9).policy);
  SavePolicy(b, TrainBc(d, TinyHyper(), 9).policy);
  EXPECT_EQ(Slurp(a), Slurp(b));
  const Policy loaded = LoadPolicy(a);
  const BcResult again = TrainBc(d, TinyHyper(), 9);
  const auto obs = games::RpsObservation(1);
  EXPECT_EQ(loaded.ActionProbs(obs), again.policy.ActionProbs(obs));
  SavePolicy(b, TrainBc(d, TinyHyper(), 10).policy);
  EXPECT_NE(Slurp(a), Slurp(b));
}

TEST(Evaluate, KuhnScoreMatchesSeatAveragedValue) {
  const auto a = games::KuhnNoisyNashStrategy(0.5);
  const auto b = games::KuhnAlwaysBetStrategy();
  const games::EnvConfig env{EnvKind::kKuhn, 0};
  const Score s = EvaluateAvgScore(AgentOf("a", a), AgentOf("b", b), env, 100000, 1);
  const double exact =
      0.5 * (testing::KuhnTreeValue(a, b) - testing::KuhnTreeValue(b, a));
  EXPECT_NEAR(s.mean, exact, 3.0 * s.std_error);
  EXPECT_EQ(s.games, 100000);
}

TEST(Evaluate, SupportedExploitabilityRpsExact) {
  // A stationary learner x against stationary demonstrators y_d:
  // value = max_d -(x' M y_d).
  const auto pool = games::ParsePoolSpec(EnvKind::kRps, "uniform:0:1,biased:0.5:1");
  const games::MixedStrategy x(Eigen::Vector3d(0.5, 0.3, 0.2));
  const auto learner = games::RpsStationaryStrategy(x);
  const SupportedExploitability se =
      ComputeSupportedExploitability(learner, pool, {EnvKind::kRps, 50}, 100, 0);
  EXPECT_TRUE(se.exact);
  const Eigen::Matrix3d m = games::RockPaperScissors().payoff();
  double worst = -1e9;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto y = games::RpsStationaryMixture(pool.entries()[i].by_role[0]);
    const double loss = -(x.weights().transpose() * m * y->weights())(0, 0);
    EXPECT_NEAR(se.per_demonstrator[i], loss, 1e-12);
    worst = std::max(worst, loss);
  }
  EXPECT_NEAR(se.value, worst, 1e-12);
}

TEST(Evaluate, SupportedExploitabilityKuhnExact) {
  const auto pool = games::ParsePoolSpec(EnvKind::kKuhn, "nash:0.2:1,always-bet:0:1");
  const auto learner = games::KuhnNeverBluffStrategy();
  const SupportedExploitability se =
      ComputeSupportedExploitability(learner, pool, {EnvKind::kKuhn, 0}, 100, 0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& d = pool.entries()[i].by_role[0];
    const double reward =
        0.5 * (testing::KuhnTreeValue(learner, d) - testing::KuhnTreeValue(d, learner));
    EXPECT_NEAR(se.per_demonstrator[i], -reward, 1e-12);
  }
  // Nash demonstrators never lose on average, so the learner cannot gain.
  EXPECT_GE(se.per_demonstrator[0], -1e-12);
}

TEST(Evaluate, ReactiveLearnerUsesSimulationFreeEffectiveMixture) {
  // Beat-last-action never loses on average to a stationary opponent.
  games::BehavioralStrategy reactive;
  reactive.Set("start", {1.0 / 3, 1.0 / 3, 1.0 / 3});
  reactive.Set("rock", {0, 1, 0});
  reactive.Set("paper", {0, 0, 1});
  reactive.Set("scissors", {1, 0, 0});
  const auto pool = games::ParsePoolSpec(EnvKind::kRps, "uniform:0:1,biased:0.5:1");
  const auto se = ComputeSupportedExploitability(reactive, pool, {EnvKind::kRps, 100}, 10, 0);
  EXPECT_TRUE(se.exact);
  EXPECT_NEAR(se.per_demonstrator[0], 0.0, 1e-12);
  for (std::size_t i = 1; i < pool.size(); ++i) EXPECT_LT(se.per_demonstrator[i], 0.0);
}

TEST(Evaluate, CrossEvaluateLayout) {
  const auto nash = games::KuhnNashStrategy(0.0);
  const auto bet = games::KuhnAlwaysBetStrategy();
  const auto pass = games::KuhnAlwaysPassStrategy();
  const std::vector<Agent> agents = {AgentOf("nash", nash), AgentOf("bet", bet),
                                     AgentOf("pass", pass)};
  const games::EnvConfig env{EnvKind::kKuhn, 0};
  const Matrix m = CrossEvaluate(agents, env, 20000, 3);
  ASSERT_EQ(m.rows(), 3);
  // Cell (i, j) is the score of column agent j against row agent i.
  const double bet_vs_pass =
      0.5 * (testing::KuhnTreeValue(bet, pass) - testing::KuhnTreeValue(pass, bet));
  EXPECT_NEAR(m(2, 1), bet_vs_pass, 0.03);
  EXPECT_NEAR(m(1, 2), -bet_vs_pass, 0.03);
  EXPECT_THROW(CrossEvaluate({agents[0]}, env, 10, 0), Error);
}

TEST(ThresholdSearch, PicksFirstMinimumAndSkipsEmptyFilters) {
  const games::Dataset d = RpsData("uniform:0:1,biased:0.5:1", 30, 10, 7);
  ElAssignment el;
  for (const auto& t : d.trajectories) {
    el[games::KeyOf(t)] = t.demonstrator_tag == "uniform" ? 0.0 : 1.0;
  }
  const auto pool = games::ParsePoolSpec(EnvKind::kRps, "uniform:0:1,biased:0.5:1");
  PolicyHyper h = TinyHyper();
  h.epochs = 5;
  const ThresholdSearch s =
      SearchThreshold(d, el, {0.5, 1.0}, pool, {EnvKind::kRps, 10}, h, 1, 100);
  ASSERT_EQ(s.trials.size(), 2u);
  const double best = std::min(s.trials[0].supported_exploitability,
                               s.trials[1].supported_exploitability);
  EXPECT_EQ(s.best_threshold,
            s.trials[0].supported_exploitability == best ? 0.5 : 1.0);
  ElAssignment high = el;
  for (auto& [k, v] : high) v = 0.9;
  const ThresholdSearch only =
      SearchThreshold(d, high, {0.5, 1.0}, pool, {EnvKind::kRps, 10}, h, 1, 100);
  EXPECT_EQ(only.trials.size(), 1u);
  EXPECT_EQ(only.best_threshold, 1.0);
}

}  // namespace
}  // namespace ela::ol
