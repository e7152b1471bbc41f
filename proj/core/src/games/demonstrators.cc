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

#include "ela/games/demonstrators.h"

#include <cctype>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "ela/common/error.h"
#include "ela/games/kuhn.h"
#include "ela/games/matrix_game.h"
#include "ela/games/rps.h"

namespace ela::games {
namespace {

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double ParseNumber(std::string_view token, std::string_view what) {
  const std::string text(token);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(value)) {
    Fail(fmt::format("pool spec: invalid {} '{}'", what, token));
  }
  return value;
}

Demonstrator Make(std::string name, std::string_view param_text, double param,
                  double weight, const BehavioralStrategy& strategy,
                  bool tag_param) {
  Demonstrator d;
  d.tag = tag_param ? fmt::format("{}@{}", name, param_text) : name;
  d.name = std::move(name);
  d.param = param;
  d.weight = weight;
  d.by_role = {strategy, strategy};
  return d;
}

void AppendRps(std::string_view name, std::string_view param_text,
               double param, double weight, std::vector<Demonstrator>& out) {
  if (name == "uniform") {
    out.push_back(Make("uniform", param_text, 0.0, weight,
                       RpsBiasedStrategy(kRock, 0.0), false));
  } else if (name == "biased") {
    for (int a = 0; a < kRpsNumActions; ++a) {
      out.push_back(Make(RpsActionName(a), param_text, param, weight / 3.0,
                         RpsBiasedStrategy(a, param), true));
    }
  } else if (name == "rock" || name == "paper" || name == "scissors") {
    out.push_back(Make(std::string(name), param_text, param, weight,
                       RpsBiasedStrategy(ParseRpsAction(name), param), true));
  } else {
    Fail(fmt::format("pool spec: unknown RPS demonstrator '{}'", name));
  }
}

void AppendKuhn(std::string_view name, std::string_view param_text,
                double param, double weight, std::vector<Demonstrator>& out) {
  if (name == "nash") {
    out.push_back(Make("nash", param_text, param, weight,
                       KuhnNashStrategy(param), true));
  } else if (name == "noisy") {
    out.push_back(Make("noisy", param_text, param, weight,
                       KuhnNoisyNashStrategy(param), true));
  } else if (name == "never-bluff") {
    out.push_back(Make("never-bluff", param_text, 0.0, weight,
                       KuhnNeverBluffStrategy(), false));
  } else if (name == "always-bet") {
    out.push_back(Make("always-bet", param_text, 0.0, weight,
                       KuhnAlwaysBetStrategy(), false));
  } else if (name == "always-pass") {
    out.push_back(Make("always-pass", param_text, 0.0, weight,
                       KuhnAlwaysPassStrategy(), false));
  } else if (name == "uniform") {
    out.push_back(Make("uniform", param_text, 0.0, weight,
                       KuhnUniformStrategy(), false));
  } else {
    Fail(fmt::format("pool spec: unknown Kuhn demonstrator '{}'", name));
  }
}

}  // namespace

DemonstratorPool::DemonstratorPool(EnvKind env,
                                   std::vector<Demonstrator> entries,
                                   std::string spec)
    : env_(env), entries_(std::move(entries)), spec_(std::move(spec)) {
  Check(!entries_.empty(), "demonstrator pool is empty");
  double total = 0.0;
  for (const Demonstrator& d : entries_) {
    if (!(d.weight >= 0.0)) {
      Fail(fmt::format("demonstrator '{}' has negative weight", d.tag));
    }
    total += d.weight;
    weights_.push_back(d.weight);
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(fmt::format("demonstrator weights sum to {}, not 1", total));
  }
}

const Demonstrator& DemonstratorPool::Sample(Rng& rng) const {
  return entries_[rng.Categorical(weights_)];
}

DemonstratorPool ParsePoolSpec(EnvKind env, std::string_view spec) {
  std::vector<Demonstrator> entries;
  for (std::string_view raw : Split(spec, ',')) {
    const std::string_view entry = Trim(raw);
    if (entry.empty()) continue;
    const auto fields = Split(entry, ':');
    if (fields.size() != 3) {
      Fail(fmt::format("pool spec entry '{}' is not name:param:weight", entry));
    }
    const std::string_view name = Trim(fields[0]);
    const std::string_view param_text = Trim(fields[1]);
    const double param = ParseNumber(param_text, "parameter");
    const double weight = ParseNumber(Trim(fields[2]), "weight");
    if (weight < 0.0) Fail(fmt::format("pool spec: negative weight in '{}'", entry));
    if (env == EnvKind::kRps) {
      AppendRps(name, param_text, param, weight, entries);
    } else {
      AppendKuhn(name, param_text, param, weight, entries);
    }
  }
  Check(!entries.empty(), "pool spec is empty");
  double total = 0.0;
  for (const auto& d : entries) total += d.weight;
  Check(total > 0.0, "pool spec weights sum to zero");
  for (auto& d : entries) d.weight /= total;
  return DemonstratorPool(env, std::move(entries), std::string(spec));
}

double DemonstratorExploitability(EnvKind env, const Demonstrator& d) {
  if (env == EnvKind::kKuhn) return KuhnExploitability(d.by_role[0], d.by_role[1]);
  const auto mix0 = RpsStationaryMixture(d.by_role[0]);
  const auto mix1 = RpsStationaryMixture(d.by_role[1]);
  Check(mix0.has_value() && mix1.has_value(),
        "exact RPS exploitability needs observation-independent strategies");
  const MatrixGame rps = RockPaperScissors();
  return 0.5 * (Exploitability(rps, *mix0) + Exploitability(rps, *mix1));
}

Dataset GenerateDataset(const DemonstratorPool& pool, std::int64_t num_games,
                        const EnvConfig& env, std::uint64_t seed) {
  Check(num_games >= 1, "GenerateDataset: need at least one game");
  Check(pool.env() == env.kind, "GenerateDataset: pool built for another env");
  Dataset dataset;
  dataset.meta.env = EnvName(env.kind);
  dataset.meta.rps_rounds = env.rps_rounds;
  dataset.meta.seed = seed;
  dataset.meta.num_games = num_games;
  dataset.meta.pool = pool.spec();
  dataset.trajectories.reserve(2 * num_games);
  for (std::int64_t g = 0; g < num_games; ++g) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(g)));
    const Demonstrator* first = &pool.Sample(rng);
    const Demonstrator* second = &pool.Sample(rng);
    if (rng.Uniform() < 0.5) std::swap(first, second);
    auto [t0, t1] = PlayEpisode(env, first->by_role[0], second->by_role[1], rng);
    t0.game_id = g;
    t1.game_id = g;
    t0.demonstrator_tag = first->tag;
    t1.demonstrator_tag = second->tag;
    dataset.trajectories.push_back(std::move(t0));
    dataset.trajectories.push_back(std::move(t1));
  }
  return dataset;
}

}  // namespace ela::games
