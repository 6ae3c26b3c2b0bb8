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

// Run configuration file and the plans it expands to.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvlab/records.hpp"

namespace nvlab {

struct TransportConfig {
  int max_retries = 5;
  int base_delay_ms = 500;
  int max_delay_ms = 30000;
  int timeout_s = 120;
  double requests_per_second = 0.0;  // 0 disables the rate limiter
  double burst = 1.0;
  std::int64_t request_budget = 20000;

  bool operator==(const TransportConfig&) const = default;
};

struct RunConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string credential_env = "OPENAI_API_KEY";
  // Agent specs in the short form accepted by parse_agent().
  std::vector<std::string> agents = {"optimal"};
  double temperature = 1.0;
  int max_parse_retries = 2;
  std::vector<std::string> experiments = {"E1", "E2", "E3"};
  std::vector<std::string> distributions = {"uniform", "normal", "lognormal"};
  // Risk-neutral runs skip the lognormal unless this is set.
  bool risk_neutral_lognormal = false;
  std::vector<std::string> order_conditions = {"high-first", "low-first"};
  int repetitions = 10;
  int rounds = 15;
  std::uint64_t seed = 42;
  std::string output_dir = "runs";
  std::string run_name;  // empty: derived from the plan hash
  int workers = 1;
  bool transcript_continuity = true;
  std::optional<double> lognormal_log_mean;
  std::optional<double> lognormal_log_sd;
  TransportConfig transport;

  // Throws ConfigError naming the first bad field.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
// Unknown keys are rejected so typos surface as config errors.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Short agent forms:
//   optimal | random[:seed] | mean-anchor:W | demand-chaser:ALPHA
//   demand-chaser:EARLY->LATE@ROUND | fixture:HIGH/LOW | llm:MODEL
AgentSpec parse_agent(const std::string& text, double temperature = 1.0, int max_parse_retries = 2);

// One plan per configured agent, each over the full condition grid.
std::vector<ExperimentPlan> build_plans(const RunConfig& config, const std::string& template_digest);

bool has_llm_agent(const RunConfig& config);

}  // namespace nvlab
