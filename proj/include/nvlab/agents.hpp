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

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvlab/chat_client.hpp"
#include "nvlab/prompt.hpp"

namespace nvlab {

enum class AgentKind { kLlm, kOptimal, kMeanAnchor, kDemandChaser, kRandom, kFixture };

std::string_view to_string(AgentKind kind);
AgentKind agent_kind_from_string(std::string_view name);

enum class ParseConfidence { kExact, kFallback, kAmbiguous };

std::string_view to_string(ParseConfidence confidence);
ParseConfidence parse_confidence_from_string(std::string_view name);

// Order extraction rules. Each pattern is an ECMAScript regex matched
// case-insensitively whose first capture group is the number. Rules run in
// order; within a rule the last in-range match is taken, since replies state
// their final decision after the reasoning.
struct ParsePolicy {
  std::vector<std::string> patterns = default_patterns();
  // Also try the last number on the last line that mentions "order".
  bool order_line_rule = true;
  int plausible_min = 0;
  // Upper bound of the plausible range; <= 0 means 2b of the scenario.
  int plausible_max = 0;
  int max_retries = 2;

  static std::vector<std::string> default_patterns();
};

struct ExtractedOrder {
  int order = 0;
  ParseConfidence confidence = ParseConfidence::kAmbiguous;
};

// Throws AmbiguousDecisionError when no integer in the plausible range is
// found. `plausible_max` must already be resolved (> 0).
ExtractedOrder extract_order(std::string_view raw, const ParsePolicy& policy);

struct AgentSpec {
  AgentKind kind = AgentKind::kOptimal;
  std::string model_name;     // llm
  double temperature = 1.0;   // llm
  double anchor_weight = 0.0; // mean-anchor: order = A + w (q* - A)
  double chase_rate = 1.0;    // demand-chaser alpha
  // demand-chaser: rounds before switch_round use chase_rate_early.
  int switch_round = 0;
  double chase_rate_early = 0.0;
  // demand-chaser: first order of a block; negative means round(A).
  int initial_order = -1;
  std::uint64_t seed = 0;     // random
  double fixture_mean_high = 0.0;  // fixture: target mean orders
  double fixture_mean_low = 0.0;
  ParsePolicy parse_policy;   // llm

  // Short human-readable identity used to group report rows.
  std::string label() const;
  void validate() const;
};

struct Decision {
  int order = 0;
  std::string rationale;
  std::string raw_response;
  ParseConfidence confidence = ParseConfidence::kExact;
  TokenUsage usage;
  int attempts = 1;         // chat requests that returned text
  int transport_retries = 0;
};

// One decision maker bound to one repetition. The LLM agent keeps the running
// conversation; scripted agents are stateless.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Decision decide(const std::string& prompt, const RoundContext& ctx) = 0;
  // Replaces the conversation so far (used on resume and when transcript
  // continuity is switched off between blocks).
  virtual void set_transcript(std::vector<ChatMessage> transcript) { (void)transcript; }
  virtual const std::vector<ChatMessage>& transcript() const;
};

// `chat` may be null for scripted kinds.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::shared_ptr<ChatClient> chat);

// Scripted decision rule; throws for the llm kind.
Decision decide_scripted(const AgentSpec& spec, const RoundContext& ctx);

class LlmAgent final : public Agent {
 public:
  LlmAgent(AgentSpec spec, std::shared_ptr<ChatClient> chat);
  Decision decide(const std::string& prompt, const RoundContext& ctx) override;
  void set_transcript(std::vector<ChatMessage> transcript) override;
  const std::vector<ChatMessage>& transcript() const override { return transcript_; }

 private:
  AgentSpec spec_;
  std::shared_ptr<ChatClient> chat_;
  std::vector<ChatMessage> transcript_;
};

}  // namespace nvlab
