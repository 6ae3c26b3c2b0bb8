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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nvlab/agents.hpp"
#include "nvlab/newsvendor.hpp"

namespace nvlab {

enum class OrderCondition { kHighFirst, kLowFirst };

std::string_view to_string(OrderCondition oc);
OrderCondition order_condition_from_string(std::string_view name);

// One (experiment, distribution, agent, order condition) cell of a plan. Each
// repetition runs two consecutive scenario blocks, one per margin, in the
// order given by `order_condition`.
struct PlanCondition {
  ScenarioConfig high;
  ScenarioConfig low;
  AgentSpec agent;
  OrderCondition order_condition = OrderCondition::kHighFirst;
  int repetitions = 10;
  int rounds_per_block = 15;
  std::uint64_t base_seed = 0;

  // block_index is 1 or 2.
  const ScenarioConfig& block_scenario(int block_index) const;
  void validate() const;
};

struct ExperimentPlan {
  std::string run_id;
  std::vector<PlanCondition> conditions;
  // LLM agents keep one conversation across both blocks of a repetition.
  bool transcript_continuity = true;
  std::string template_digest;

  void validate() const;
  int total_blocks() const;
  int total_rounds() const;
};

struct RoundRecord {
  int round_index = 0;
  std::string prompt_hash;
  std::string raw_response;
  std::string rationale;
  int order = 0;
  int demand = 0;
  double profit = 0.0;
  double cumulative_profit = 0.0;
  ParseConfidence parse_confidence = ParseConfidence::kExact;
  int attempts = 0;
  int transport_retries = 0;
  std::string started_at;
  std::string finished_at;
  TokenUsage token_usage;

  RoundOutcome outcome() const { return {order, demand, profit, cumulative_profit}; }
};

struct TrajectoryKey {
  int condition = 0;
  int repetition = 0;
  int block_index = 1;

  auto operator<=>(const TrajectoryKey&) const = default;
  // e.g. "c3-r07-b2"
  std::string id() const;
};

struct Trajectory {
  std::string run_id;
  TrajectoryKey key;
  AgentSpec agent;
  ScenarioConfig scenario;
  OrderCondition order_condition = OrderCondition::kHighFirst;
  std::vector<RoundRecord> rounds;
  bool complete = false;

  std::vector<int> orders() const;
  std::vector<int> demands() const;
};

}  // namespace nvlab
