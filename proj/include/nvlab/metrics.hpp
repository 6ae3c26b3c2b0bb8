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
#pragma once

// Bias, anchoring, efficiency, adjustment and learning measures computed from
// stored trajectories. Everything here is a pure function of its inputs.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nvlab/records.hpp"

namespace nvlab {

struct BiasStats {
  double mean_order = 0.0;
  int optimal = 0;
  double order_bias = 0.0;       // mean_order - optimal
  double normalized_bias = 0.0;  // percent of optimal
  std::size_t orders = 0;
};

BiasStats bias_from_mean(double mean_order, int optimal);
// Pools every order of every trajectory; all must share one scenario.
BiasStats bias_stats(std::span<const Trajectory* const> trajectories);

enum class MasOrientation {
  kAdjustment,  // (q - A) / (q* - A): 1 at full adjustment, 0 at the anchor
  kPrinted,     // (q* - A) / (q - A), the reciprocal
};

struct AnchorStats {
  double anchor = 0.0;
  double mas = 0.0;
  bool undefined = false;
};

AnchorStats mas(double mean_order, double anchor, double optimal, Margin margin,
                MasOrientation orientation = MasOrientation::kAdjustment);

struct Efficiency {
  double percent = 0.0;
  bool undefined = false;  // expected profit at q is not positive
};

// E[profit(q*)] / E[profit(q)] * 100.
Efficiency profit_efficiency(double order, const ScenarioConfig& scenario);

enum class Direction { kNoChange, kToward, kAway };
std::string_view to_string(Direction d);

struct AdjustmentEvent {
  int round_index = 0;  // t >= 2
  int delta = 0;        // q_t - q_{t-1}
  int prior_error = 0;  // d_{t-1} - q_{t-1}
  Direction direction = Direction::kNoChange;
  int magnitude = 0;    // |delta|
  int quartile = 0;     // 1..4 once assigned, 0 before
};

struct QuartileCuts {
  std::array<double, 3> cuts{};
  // 1..4; a value equal to a cut falls in the lower quartile.
  int assign(double abs_error) const;
};

// 25th/50th/75th percentiles with linear interpolation between order
// statistics. Needs at least four values.
QuartileCuts quartile_thresholds(std::vector<double> pool);

std::vector<AdjustmentEvent> classify_adjustments(std::span<const int> orders, std::span<const int> demands);
std::vector<AdjustmentEvent> classify_adjustments(const Trajectory& trajectory);
void assign_quartiles(std::vector<AdjustmentEvent>& events, const QuartileCuts& cuts);

struct DirectionShares {
  std::size_t events = 0;
  double no_change = 0.0;  // percent
  double toward = 0.0;
  double away = 0.0;
  double mean_magnitude = 0.0;
};

DirectionShares direction_shares(std::span<const AdjustmentEvent> events);

struct OlsFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
  std::size_t n = 0;
  // Fewer than two points, or x or y has zero variance. Slope and R^2 are
  // then reported as 0.
  bool degenerate = false;
};

OlsFit ols(std::span<const double> x, std::span<const double> y);

struct LearningOptions {
  int early_first = 1;
  int early_last = 7;
  int late_first = 8;
  int late_last = 15;
};

struct LearningStats {
  double convergence_slope = 0.0;  // units per round
  double efficiency_slope = 0.0;   // percent per round
  double r2_early = 0.0;
  double r2_late = 0.0;
  double delta_r2 = 0.0;
  bool early_degenerate = false;
  bool late_degenerate = false;
  int efficiency_undefined_rounds = 0;  // rounds dropped from the PE fit
};

LearningStats learning_stats(const Trajectory& trajectory, const LearningOptions& options = {});

// Averages per-trajectory statistics (default) or fits once on the pooled
// (t, y) pairs of every trajectory.
LearningStats learning_stats(std::span<const Trajectory* const> trajectories, bool pooled,
                             const LearningOptions& options = {});

const std::vector<std::string>& default_stopwords();

// Case-folded unigram counts, sorted by count descending then term.
std::vector<std::pair<std::string, int>> word_frequencies(std::span<const std::string> texts,
                                                          const std::vector<std::string>& stopwords);

}  // namespace nvlab
