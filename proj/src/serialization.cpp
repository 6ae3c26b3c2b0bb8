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
#include "nvlab/serialization.hpp"

#include "nvlab/error.hpp"
#include "nvlab/prompt.hpp"

namespace nvlab {

void to_json(json& j, const CostStructure& v) {
  j = json{{"price", v.price}, {"cost", v.cost}, {"salvage", v.salvage}};
}

void from_json(const json& j, CostStructure& v) {
  v.price = j.at("price").get<double>();
  v.cost = j.at("cost").get<double>();
  v.salvage = j.value("salvage", 0.0);
}

void to_json(json& j, const DemandDistribution& v) {
  j = json{{"kind", to_string(v.kind())}, {"lower", v.lower()}, {"upper", v.upper()}};
  if (v.kind() == DemandKind::kTruncatedNormal) {
    j["mu"] = v.location();
    j["sigma"] = v.scale();
  } else if (v.kind() == DemandKind::kLognormal) {
    j["log_mean"] = v.location();
    j["log_sd"] = v.scale();
  }
}

DemandDistribution demand_from_json(const json& j) {
  const auto kind = demand_kind_from_string(j.at("kind").get<std::string>());
  const int a = j.at("lower").get<int>();
  const int b = j.at("upper").get<int>();
  switch (kind) {
    case DemandKind::kUniform:
      return DemandDistribution::uniform(a, b);
    case DemandKind::kTruncatedNormal:
      if (j.contains("mu")) {
        return DemandDistribution::truncated_normal(a, b, j.at("mu").get<double>(),
                                                    j.at("sigma").get<double>());
      }
      return DemandDistribution::truncated_normal(a, b);
    case DemandKind::kLognormal:
      if (j.contains("log_mean")) {
        return DemandDistribution::lognormal(a, b, j.at("log_mean").get<double>(),
                                             j.at("log_sd").get<double>());
      }
      return DemandDistribution::lognormal(a, b);
  }
  throw InvalidScenarioError("unreachable demand kind");
}

void to_json(json& j, const ScenarioConfig& v) {
  j = json{{"costs", v.costs},
           {"demand", v.demand},
           {"experiment", to_string(v.experiment)},
           {"margin", to_string(v.margin)},
           {"rounds", v.rounds}};
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig sc;
  sc.costs = j.at("costs").get<CostStructure>();
  sc.demand = demand_from_json(j.at("demand"));
  sc.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  sc.margin = margin_from_string(j.at("margin").get<std::string>());
  sc.rounds = j.value("rounds", 15);
  return sc;
}

void to_json(json& j, const ParsePolicy& v) {
  j = json{{"patterns", v.patterns},
           {"order_line_rule", v.order_line_rule},
           {"plausible_min", v.plausible_min},
           {"plausible_max", v.plausible_max},
           {"max_retries", v.max_retries}};
}

void from_json(const json& j, ParsePolicy& v) {
  ParsePolicy d;
  v.patterns = j.value("patterns", d.patterns);
  v.order_line_rule = j.value("order_line_rule", d.order_line_rule);
  v.plausible_min = j.value("plausible_min", d.plausible_min);
  v.plausible_max = j.value("plausible_max", d.plausible_max);
  v.max_retries = j.value("max_retries", d.max_retries);
}

void to_json(json& j, const AgentSpec& v) {
  j = json{{"kind", to_string(v.kind)}};
  switch (v.kind) {
    case AgentKind::kLlm:
      j["model_name"] = v.model_name;
      j["temperature"] = v.temperature;
      j["parse_policy"] = v.parse_policy;
      break;
    case AgentKind::kMeanAnchor:
      j["anchor_weight"] = v.anchor_weight;
      break;
    case AgentKind::kDemandChaser:
      j["chase_rate"] = v.chase_rate;
      j["switch_round"] = v.switch_round;
      j["chase_rate_early"] = v.chase_rate_early;
      j["initial_order"] = v.initial_order;
      break;
    case AgentKind::kRandom:
      j["seed"] = v.seed;
      break;
    case AgentKind::kFixture:
      j["fixture_mean_high"] = v.fixture_mean_high;
      j["fixture_mean_low"] = v.fixture_mean_low;
      break;
    case AgentKind::kOptimal:
      break;
  }
}

void from_json(const json& j, AgentSpec& v) {
  AgentSpec d;
  v = d;
  v.kind = agent_kind_from_string(j.at("kind").get<std::string>());
  v.model_name = j.value("model_name", d.model_name);
  v.temperature = j.value("temperature", d.temperature);
  v.anchor_weight = j.value("anchor_weight", d.anchor_weight);
  v.chase_rate = j.value("chase_rate", d.chase_rate);
  v.switch_round = j.value("switch_round", d.switch_round);
  v.chase_rate_early = j.value("chase_rate_early", d.chase_rate_early);
  v.initial_order = j.value("initial_order", d.initial_order);
  v.seed = j.value("seed", d.seed);
  v.fixture_mean_high = j.value("fixture_mean_high", d.fixture_mean_high);
  v.fixture_mean_low = j.value("fixture_mean_low", d.fixture_mean_low);
  if (j.contains("parse_policy")) v.parse_policy = j.at("parse_policy").get<ParsePolicy>();
}

void to_json(json& j, const PlanCondition& v) {
  j = json{{"high", v.high},
           {"low", v.low},
           {"agent", v.agent},
           {"order_condition", to_string(v.order_condition)},
           {"repetitions", v.repetitions},
           {"rounds_per_block", v.rounds_per_block},
           {"base_seed", v.base_seed}};
}

PlanCondition condition_from_json(const json& j) {
  PlanCondition c;
  c.high = scenario_from_json(j.at("high"));
  c.low = scenario_from_json(j.at("low"));
  c.agent = j.at("agent").get<AgentSpec>();
  c.order_condition = order_condition_from_string(j.at("order_condition").get<std::string>());
  c.repetitions = j.at("repetitions").get<int>();
  c.rounds_per_block = j.at("rounds_per_block").get<int>();
  c.base_seed = j.at("base_seed").get<std::uint64_t>();
  return c;
}

void to_json(json& j, const ExperimentPlan& v) {
  json conditions = json::array();
  for (const auto& c : v.conditions) conditions.push_back(c);
  j = json{{"run_id", v.run_id},
           {"conditions", conditions},
           {"transcript_continuity", v.transcript_continuity},
           {"template_digest", v.template_digest}};
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan p;
  p.run_id = j.at("run_id").get<std::string>();
  for (const auto& c : j.at("conditions")) p.conditions.push_back(condition_from_json(c));
  p.transcript_continuity = j.value("transcript_continuity", true);
  p.template_digest = j.value("template_digest", "");
  return p;
}

void to_json(json& j, const TokenUsage& v) {
  j = json{{"prompt_tokens", v.prompt_tokens},
           {"completion_tokens", v.completion_tokens},
           {"total_tokens", v.total_tokens}};
}

void from_json(const json& j, TokenUsage& v) {
  v.prompt_tokens = j.value("prompt_tokens", 0);
  v.completion_tokens = j.value("completion_tokens", 0);
  v.total_tokens = j.value("total_tokens", 0);
}

void to_json(json& j, const RoundRecord& v) {
  j = json{{"round", v.round_index},
           {"prompt_hash", v.prompt_hash},
           {"order", v.order},
           {"demand", v.demand},
           {"profit", v.profit},
           {"cumulative_profit", v.cumulative_profit},
           {"parse_confidence", to_string(v.parse_confidence)},
           {"attempts", v.attempts},
           {"transport_retries", v.transport_retries},
           {"token_usage", v.token_usage},
           {"raw_response", v.raw_response},
           {"rationale", v.rationale},
           {"started_at", v.started_at},
           {"finished_at", v.finished_at}};
}

void from_json(const json& j, RoundRecord& v) {
  v.round_index = j.at("round").get<int>();
  v.prompt_hash = j.at("prompt_hash").get<std::string>();
  v.order = j.at("order").get<int>();
  v.demand = j.at("demand").get<int>();
  v.profit = j.at("profit").get<double>();
  v.cumulative_profit = j.at("cumulative_profit").get<double>();
  v.parse_confidence = parse_confidence_from_string(j.at("parse_confidence").get<std::string>());
  v.attempts = j.value("attempts", 0);
  v.transport_retries = j.value("transport_retries", 0);
  if (j.contains("token_usage")) v.token_usage = j.at("token_usage").get<TokenUsage>();
  v.raw_response = j.value("raw_response", "");
  v.rationale = j.value("rationale", "");
  v.started_at = j.value("started_at", "");
  v.finished_at = j.value("finished_at", "");
}

std::string plan_hash(const ExperimentPlan& plan) { return prompt_hash(json(plan).dump()); }

}  // namespace nvlab
