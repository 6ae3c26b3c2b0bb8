// Copyright 2026 The nvlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "nvlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "nvlab/error.hpp"

namespace nvlab {

BiasStats bias_from_mean(double mean_order, int optimal) {
  if (optimal <= 0) throw Error("normalized bias needs a positive optimal quantity");
  BiasStats s;
  s.mean_order = mean_order;
  s.optimal = optimal;
  s.order_bias = mean_order - optimal;
  s.normalized_bias = s.order_bias / optimal * 100.0;
  return s;
}

BiasStats bias_stats(std::span<const Trajectory* const> trajectories) {
  if (trajectories.empty()) throw Error("bias_stats needs at least one trajectory");
  const ScenarioConfig& sc = trajectories.front()->scenario;
  long long sum = 0;
  std::size_t n = 0;
  for (const Trajectory* t : trajectories) {
    if (!(t->scenario == sc)) throw Error("bias_stats mixes scenarios");
    for (const auto& r : t->rounds) {
      sum += r.order;
      ++n;
    }
  }
  if (n == 0) throw Error("bias_stats found no rounds");
  BiasStats s = bias_from_mean(double(sum) / double(n), optimal_quantity(sc));
  s.orders = n;
  return s;
}

AnchorStats mas(double mean_order, double anchor, double optimal, Margin margin,
                MasOrientation orientation) {
  AnchorStats s;
  s.anchor = anchor;
  // High: (q - A)/(q* - A). Low: (A - q)/(A - q*). Both reduce to the same
  // ratio; the margin only fixes which side of A the optimum sits on.
  const double moved = margin == Margin::kHigh ? mean_order - anchor : anchor - mean_order;
  const double needed = margin == Margin::kHigh ? optimal - anchor : anchor - optimal;
  if (orientation == MasOrientation::kAdjustment) {
    if (needed == 0.0) {
      s.undefined = true;
      return s;
    }
    s.mas = moved / needed;
  } else {
    if (moved == 0.0 || needed == 0.0) {
      s.undefined = true;
      return s;
    }
    s.mas = needed / moved;
  }
  return s;
}

Efficiency profit_efficiency(double order, const ScenarioConfig& scenario) {
  Efficiency e;
  const double actual = expected_profit(order, scenario);
  if (!(actual > 0.0)) {
    e.undefined = true;
    return e;
  }
  e.percent = expected_profit(optimal_quantity(scenario), scenario) / actual * 100.0;
  return e;
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kNoChange: return "no-change";
    case Direction::kToward: return "toward";
    case Direction::kAway: return "away";
  }
  return "?";
}

int QuartileCuts::assign(double abs_error) const {
  for (int i = 0; i < 3; ++i) {
    if (abs_error <= cuts[i]) return i + 1;
  }
  return 4;
}

QuartileCuts quartile_thresholds(std::vector<double> pool) {
  if (pool.size() < 4) throw Error("quartile thresholds need at least 4 values");
  std::sort(pool.begin(), pool.end());
  QuartileCuts q;
  const double last = double(pool.size() - 1);
  for (int i = 0; i < 3; ++i) {
    const double pos = 0.25 * (i + 1) * last;
    const auto lo = std::size_t(std::floor(pos));
    const auto hi = std::min(lo + 1, pool.size() - 1);
    q.cuts[i] = pool[lo] + (pos - double(lo)) * (pool[hi] - pool[lo]);
  }
  return q;
}

std::vector<AdjustmentEvent> classify_adjustments(std::span<const int> orders,
                                                  std::span<const int> demands) {
  if (orders.size() != demands.size()) throw Error("orders and demands differ in length");
  std::vector<AdjustmentEvent> events;
  for (std::size_t t = 1; t < orders.size(); ++t) {
    AdjustmentEvent e;
    e.round_index = int(t) + 1;
    e.delta = orders[t] - orders[t - 1];
    e.prior_error = demands[t - 1] - orders[t - 1];
    e.magnitude = std::abs(e.delta);
    const long long sign = (long long)e.delta * e.prior_error;
    if (e.delta == 0 || sign == 0) {
      e.direction = Direction::kNoChange;
    } else {
      e.direction = sign > 0 ? Direction::kToward : Direction::kAway;
    }
    events.push_back(e);
  }
  return events;
}

std::vector<AdjustmentEvent> classify_adjustments(const Trajectory& trajectory) {
  const auto orders = trajectory.orders();
  const auto demands = trajectory.demands();
  return classify_adjustments(orders, demands);
}

void assign_quartiles(std::vector<AdjustmentEvent>& events, const QuartileCuts& cuts) {
  for (auto& e : events) e.quartile = cuts.assign(std::abs(e.prior_error));
}

DirectionShares direction_shares(std::span<const AdjustmentEvent> events) {
  DirectionShares s;
  s.events = events.size();
  if (events.empty()) return s;
  std::size_t none = 0, toward = 0, away = 0;
  double magnitude = 0.0;
  for (const auto& e : events) {
    magnitude += e.magnitude;
    switch (e.direction) {
      case Direction::kNoChange: ++none; break;
      case Direction::kToward: ++toward; break;
      case Direction::kAway: ++away; break;
    }
  }
  const double n = double(events.size());
  s.no_change = 100.0 * double(none) / n;
  s.toward = 100.0 * double(toward) / n;
  s.away = 100.0 * double(away) / n;
  s.mean_magnitude = magnitude / n;
  return s;
}

OlsFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("ols inputs differ in length");
  OlsFit fit;
  fit.n = x.size();
  if (fit.n < 2) {
    fit.degenerate = true;
    if (fit.n == 1) fit.intercept = y[0];
    return fit;
  }
  const double n = double(fit.n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) {
    fit.degenerate = true;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.r2 = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

namespace {

struct Series {
  std::vector<double> t_conv, conv;
  std::vector<double> t_eff, eff;
  std::vector<double> err_early, adj_early;
  std::vector<double> err_late, adj_late;
  int undefined_pe = 0;
};

void collect(const Trajectory& traj, const LearningOptions& opt, Series& s) {
  const int q_star = optimal_quantity(traj.scenario);
  for (const auto& r : traj.rounds) {
    s.t_conv.push_back(r.round_index);
    s.conv.push_back(std::abs(r.order - q_star));
    const auto pe = profit_efficiency(r.order, traj.scenario);
    if (pe.undefined) {
      ++s.undefined_pe;
    } else {
      s.t_eff.push_back(r.round_index);
      s.eff.push_back(pe.percent);
    }
  }
  for (const auto& e : classify_adjustments(traj)) {
    if (e.round_index >= opt.early_first && e.round_index <= opt.early_last) {
      s.err_early.push_back(e.prior_error);
      s.adj_early.push_back(e.delta);
    } else if (e.round_index >= opt.late_first && e.round_index <= opt.late_last) {
      s.err_late.push_back(e.prior_error);
      s.adj_late.push_back(e.delta);
    }
  }
}

LearningStats fit(const Series& s) {
  LearningStats out;
  out.convergence_slope = ols(s.t_conv, s.conv).slope;
  out.efficiency_slope = ols(s.t_eff, s.eff).slope;
  const auto early = ols(s.err_early, s.adj_early);
  const auto late = ols(s.err_late, s.adj_late);
  out.r2_early = early.r2;
  out.r2_late = late.r2;
  out.early_degenerate = early.degenerate;
  out.late_degenerate = late.degenerate;
  out.delta_r2 = late.r2 - early.r2;
  out.efficiency_undefined_rounds = s.undefined_pe;
  return out;
}

}  // namespace

LearningStats learning_stats(const Trajectory& trajectory, const LearningOptions& options) {
  Series s;
  collect(trajectory, options, s);
  return fit(s);
}

LearningStats learning_stats(std::span<const Trajectory* const> trajectories, bool pooled,
                             const LearningOptions& options) {
  if (trajectories.empty()) throw Error("learning_stats needs at least one trajectory");
  if (pooled) {
    Series s;
    for (const Trajectory* t : trajectories) collect(*t, options, s);
    return fit(s);
  }
  LearningStats mean;
  for (const Trajectory* t : trajectories) {
    const auto one = learning_stats(*t, options);
    mean.convergence_slope += one.convergence_slope;
    mean.efficiency_slope += one.efficiency_slope;
    mean.r2_early += one.r2_early;
    mean.r2_late += one.r2_late;
    mean.delta_r2 += one.delta_r2;
    mean.early_degenerate = mean.early_degenerate || one.early_degenerate;
    mean.late_degenerate = mean.late_degenerate || one.late_degenerate;
    mean.efficiency_undefined_rounds += one.efficiency_undefined_rounds;
  }
  const double n = double(trajectories.size());
  mean.convergence_slope /= n;
  mean.efficiency_slope /= n;
  mean.r2_early /= n;
  mean.r2_late /= n;
  mean.delta_r2 /= n;
  return mean;
}

const std::vector<std::string>& default_stopwords() {
  static const std::vector<std::string> words = {
      "a", "about", "above", "after", "again", "all", "also", "am", "an", "and", "any", "are",
      "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
      "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
      "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "him",
      "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "let", "me",
      "more", "most", "my", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
      "other", "our", "ours", "out", "over", "own", "same", "she", "should", "so", "some",
      "such", "than", "that", "the", "their", "theirs", "them", "then", "there", "these",
      "they", "this", "those", "through", "to", "too", "under", "until", "up", "us", "very",
      "was", "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why",
      "will", "with", "would", "you", "your", "yours", "s", "t", "ll", "ve", "re", "d", "m"};
  return words;
}

std::vector<std::pair<std::string, int>> word_frequencies(std::span<const std::string> texts,
                                                          const std::vector<std::string>& stopwords) {
  const std::set<std::string> stop(stopwords.begin(), stopwords.end());
  std::map<std::string, int> counts;
  const auto flush = [&](std::string& word) {
    const bool has_letter = std::any_of(word.begin(), word.end(), [](unsigned char c) {
      return std::isalpha(c) != 0;
    });
    if (has_letter && !stop.count(word)) ++counts[word];
    word.clear();
  };
  for (const auto& text : texts) {
    std::string word;
    for (const unsigned char c : text) {
      if (std::isalnum(c)) {
        word.push_back(char(std::tolower(c)));
      } else if (!word.empty()) {
        flush(word);
      }
    }
    if (!word.empty()) flush(word);
  }
  std::vector<std::pair<std::string, int>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

}  // namespace nvlab
