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
#include "nvlab/records.hpp"

#include <fmt/format.h>

#include "nvlab/error.hpp"

namespace nvlab {

std::string_view to_string(OrderCondition oc) {
  return oc == OrderCondition::kHighFirst ? "high-first" : "low-first";
}

OrderCondition order_condition_from_string(std::string_view name) {
  if (name == "high-first") return OrderCondition::kHighFirst;
  if (name == "low-first") return OrderCondition::kLowFirst;
  throw ConfigError("order_condition", "expected high-first or low-first, got '" +
                                           std::string(name) + "'");
}

const ScenarioConfig& PlanCondition::block_scenario(int block_index) const {
  const bool high_first = order_condition == OrderCondition::kHighFirst;
  if (block_index == 1) return high_first ? high : low;
  if (block_index == 2) return high_first ? low : high;
  throw Error("block_index must be 1 or 2");
}

void PlanCondition::validate() const {
  high.validate();
  low.validate();
  if (high.margin != Margin::kHigh) throw ConfigError("condition.high", "needs a high-margin scenario");
  if (low.margin != Margin::kLow) throw ConfigError("condition.low", "needs a low-margin scenario");
  if (repetitions < 1) throw ConfigError("repetitions", "must be >= 1");
  if (rounds_per_block < 1) throw ConfigError("rounds", "must be >= 1");
  if (high.rounds != rounds_per_block || low.rounds != rounds_per_block) {
    throw ConfigError("rounds", "scenario round counts disagree with rounds_per_block");
  }
  agent.validate();
}

void ExperimentPlan::validate() const {
  if (run_id.empty()) throw ConfigError("run_id", "must not be empty");
  if (run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
    throw ConfigError("run_id", "must be a plain directory name");
  }
  if (conditions.empty()) throw ConfigError("conditions", "plan has no conditions");
  for (const auto& c : conditions) c.validate();
}

int ExperimentPlan::total_blocks() const {
  int n = 0;
  for (const auto& c : conditions) n += 2 * c.repetitions;
  return n;
}

int ExperimentPlan::total_rounds() const {
  int n = 0;
  for (const auto& c : conditions) n += 2 * c.repetitions * c.rounds_per_block;
  return n;
}

std::string TrajectoryKey::id() const {
  return fmt::format("c{}-r{:02}-b{}", condition, repetition, block_index);
}

std::vector<int> Trajectory::orders() const {
  std::vector<int> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.order);
  return out;
}

std::vector<int> Trajectory::demands() const {
  std::vector<int> out;
  out.reserve(rounds.size());
  for (const auto& r : rounds) out.push_back(r.demand);
  return out;
}

}  // namespace nvlab
