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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace ela::testing {
namespace {

const char kCards[] = {'J', 'Q', 'K'};

double Prob(const games::Strategy& s, int card, const std::string& history, char move) {
  games::Observation obs;
  obs.key = std::string(1, kCards[card]) + ":" + history;
  // Width and encoding follow the public observation layout: card one-hot,
  // then a (pass, bet) pair per history position.
  obs.values.assign(9, 0.0);
  obs.values[card] = 1.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    obs.values[3 + 2 * i + (history[i] == 'b' ? 1 : 0)] = 1.0;
  }
  const std::vector<double> p = s.ActionProbs(obs);
  return move == 'p' ? p.at(0) : p.at(1);
}

// Chips won by seat 0 at a terminal line.
double Payoff(int c0, int c1, const std::string& h) {
  const double sign = c0 > c1 ? 1.0 : -1.0;
  if (h == "pp") return sign;
  if (h == "bp") return 1.0;
  if (h == "pbp") return -1.0;
  if (h == "bb" || h == "pbb") return 2.0 * sign;
  throw std::logic_error("not terminal: " + h);
}

bool Terminal(const std::string& h) {
  return h == "pp" || h == "bp" || h == "bb" || h == "pbp" || h == "pbb";
}

double Walk(int c0, int c1, const std::string& h, const games::Strategy& s0,
            const games::Strategy& s1) {
  if (Terminal(h)) return Payoff(c0, c1, h);
  const bool seat0_acts = h.size() % 2 == 0;
  const games::Strategy& s = seat0_acts ? s0 : s1;
  const int card = seat0_acts ? c0 : c1;
  double v = 0.0;
  for (char m : {'p', 'b'}) {
    const double p = Prob(s, card, h, m);
    if (p > 0.0) v += p * Walk(c0, c1, h + m, s0, s1);
  }
  return v;
}

}  // namespace

double KuhnTreeValue(const games::Strategy& seat0, const games::Strategy& seat1) {
  double total = 0.0;
  for (int c0 = 0; c0 < 3; ++c0) {
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c0 != c1) total += Walk(c0, c1, "", seat0, seat1) / 6.0;
    }
  }
  return total;
}

double KuhnBruteForceBestResponse(const games::Strategy& victim, int victim_seat) {
  const int exploiter = 1 - victim_seat;
  const std::vector<std::string> histories =
      exploiter == 0 ? std::vector<std::string>{"", "pb"} : std::vector<std::string>{"p", "b"};
  double best = -1e300;
  for (int plan = 0; plan < 64; ++plan) {
    games::BehavioralStrategy pure;
    for (int card = 0; card < 3; ++card) {
      for (int k = 0; k < 2; ++k) {
        const bool bet = (plan >> (2 * card + k)) & 1;
        pure.Set(std::string(1, kCards[card]) + ":" + histories[k],
                 {bet ? 0.0 : 1.0, bet ? 1.0 : 0.0});
      }
    }
    const double v = exploiter == 0 ? KuhnTreeValue(pure, victim)
                                    : -KuhnTreeValue(victim, pure);
    best = std::max(best, v);
  }
  return best;
}

double SimplexConditionalLossGrid(const Eigen::Vector3d& rewards, int resolution) {
  // Each small triangle of the subdivision has equal area; evaluate at its
  // centroid.
  double mass = 0.0;
  double loss = 0.0;
  const double n = resolution;
  const auto visit = [&](double a, double b) {
    const double c = 1.0 - a - b;
    const double r = a * rewards[0] + b * rewards[1] + c * rewards[2];
    if (r <= 0.0) {
      mass += 1.0;
      loss += -r;
    }
  };
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; i + j < resolution; ++j) {
      visit((i + 1.0 / 3.0) / n, (j + 1.0 / 3.0) / n);
      if (i + j + 1 < resolution) visit((i + 2.0 / 3.0) / n, (j + 2.0 / 3.0) / n);
    }
  }
  return loss / mass;
}

double KlQuadrature1d(double mq, double sq, double mp, double sp) {
  const double lo = mq - 12.0 * sq;
  const double hi = mq + 12.0 * sq;
  const int steps = 20000;
  const double dx = (hi - lo) / steps;
  const auto log_pdf = [](double x, double m, double s) {
    const double z = (x - m) / s;
    return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * M_PI);
  };
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * dx;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double lq = log_pdf(x, mq, sq);
    sum += w * std::exp(lq) * (lq - log_pdf(x, mp, sp));
  }
  return sum * dx / 3.0;
}

namespace {
std::vector<double> Ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j));
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}
}  // namespace

double SpearmanCorrelation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman sizes");
  const std::vector<double> rx = Ranks(x);
  const std::vector<double> ry = Ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double KnnAccuracy(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                   const Eigen::MatrixXd& test, std::span<const int> test_labels, int k) {
  int correct = 0;
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    for (Eigen::Index j = 0; j < train.rows(); ++j) {
      dist[j] = {(train.row(j) - test.row(i)).squaredNorm(), static_cast<int>(j)};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::map<int, int> votes;
    for (int n = 0; n < k; ++n) ++votes[train_labels[dist[n].second]];
    int best = 0;
    for (const auto& [label, count] : votes) best = std::max(best, count);
    int predicted = -1;
    for (int n = 0; n < k && predicted < 0; ++n) {
      const int label = train_labels[dist[n].second];
      if (votes[label] == best) predicted = label;
    }
    if (predicted == test_labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.rows());
}

}  // namespace ela::testing
