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

// JSON mappings for the persisted types (run manifests, JSONL records and
// config files).

#include "json.hpp"
#include "nvlab/records.hpp"

namespace nvlab {

using json = nlohmann::json;

void to_json(json& j, const CostStructure& v);
void from_json(const json& j, CostStructure& v);
void to_json(json& j, const DemandDistribution& v);
DemandDistribution demand_from_json(const json& j);
void to_json(json& j, const ScenarioConfig& v);
ScenarioConfig scenario_from_json(const json& j);
void to_json(json& j, const ParsePolicy& v);
void from_json(const json& j, ParsePolicy& v);
void to_json(json& j, const AgentSpec& v);
void from_json(const json& j, AgentSpec& v);
void to_json(json& j, const PlanCondition& v);
PlanCondition condition_from_json(const json& j);
void to_json(json& j, const ExperimentPlan& v);
ExperimentPlan plan_from_json(const json& j);
void to_json(json& j, const TokenUsage& v);
void from_json(const json& j, TokenUsage& v);
void to_json(json& j, const RoundRecord& v);
void from_json(const json& j, RoundRecord& v);

// SHA-256 of the canonical plan JSON.
std::string plan_hash(const ExperimentPlan& plan);

}  // namespace nvlab
