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
#include "nvlab/agents.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>

#include <fmt/format.h>

#include "nvlab/error.hpp"

namespace nvlab {
namespace {

constexpr std::string_view kNumber = R"((\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+(?:\.\d+)?))";

int parse_number(std::string text) {
  text.erase(std::remove(text.begin(), text.end(), ','), text.end());
  return round_half_up(std::stod(text));
}

std::string lower_copy(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return out;
}

// Last in-range capture of `re` in `text`.
std::optional<int> last_match(const std::string& text, const std::regex& re, int lo, int hi) {
  std::optional<int> found;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator();
       ++it) {
    const int value = parse_number((*it)[1].str());
    if (value >= lo && value <= hi) found = value;
  }
  return found;
}

std::string compact(double v) {
  std::string s = fmt::format("{:.4f}", v);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

int plausible_upper(const ScenarioConfig& sc) { return 2 * sc.demand.upper(); }

}  // namespace

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kLlm: return "llm";
    case AgentKind::kOptimal: return "optimal";
    case AgentKind::kMeanAnchor: return "mean-anchor";
    case AgentKind::kDemandChaser: return "demand-chaser";
    case AgentKind::kRandom: return "random";
    case AgentKind::kFixture: return "fixture";
  }
  return "?";
}

AgentKind agent_kind_from_string(std::string_view name) {
  for (const auto kind : {AgentKind::kLlm, AgentKind::kOptimal, AgentKind::kMeanAnchor,
                          AgentKind::kDemandChaser, AgentKind::kRandom, AgentKind::kFixture}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("agent.kind", "unknown agent kind '" + std::string(name) + "'");
}

std::string_view to_string(ParseConfidence confidence) {
  switch (confidence) {
    case ParseConfidence::kExact: return "exact";
    case ParseConfidence::kFallback: return "fallback";
    case ParseConfidence::kAmbiguous: return "ambiguous";
  }
  return "?";
}

ParseConfidence parse_confidence_from_string(std::string_view name) {
  if (name == "exact") return ParseConfidence::kExact;
  if (name == "fallback") return ParseConfidence::kFallback;
  if (name == "ambiguous") return ParseConfidence::kAmbiguous;
  throw IntegrityError("unknown parse confidence '" + std::string(name) + "'");
}

std::vector<std::string> ParsePolicy::default_patterns() {
  const std::string num(kNumber);
  return {
      // "I will order 185 wodgets", "order approximately **190** units"
      R"(\border(?:ing)?\s+(?:a\s+total\s+of\s+|about\s+|approximately\s+|around\s+)?\**)" + num +
          R"(\**\s*(?:wodgets|units))",
      // "order quantity: 120", "order quantity is 184", "Order Quantity = 75"
      R"(\border\s+quantity\s*(?:is|of|will\s+be|should\s+be|would\s+be)?\s*[:=]?\s*\**\s*)" + num,
      // "Order: 225"
      R"(\border\s*[:=]\s*\**\s*)" + num,
  };
}

ExtractedOrder extract_order(std::string_view raw, const ParsePolicy& policy) {
  const int lo = policy.plausible_min;
  const int hi = policy.plausible_max;
  if (hi <= 0) throw Error("extract_order needs a resolved plausible_max");
  const std::string text(raw);

  for (const auto& pattern : policy.patterns) {
    const std::regex re(pattern, std::regex::ECMAScript | std::regex::icase);
    if (auto v = last_match(text, re, lo, hi)) return {*v, ParseConfidence::kExact};
  }

  const std::regex number_re{std::string(kNumber)};
  if (policy.order_line_rule) {
    // Last line mentioning "order" whose final number is in range.
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t end = text.find('\n', start);
      lines.push_back(text.substr(start, end == std::string::npos ? std::string::npos : end - start));
      if (end == std::string::npos) break;
      start = end + 1;
    }
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
      if (lower_copy(*it).find("order") == std::string::npos) continue;
      std::optional<int> last;
      for (auto m = std::sregex_iterator(it->cbegin(), it->cend(), number_re);
           m != std::sregex_iterator(); ++m) {
        last = parse_number((*m)[1].str());
      }
      if (last && *last >= lo && *last <= hi) return {*last, ParseConfidence::kExact};
    }
  }

  if (auto v = last_match(text, number_re, lo, hi)) return {*v, ParseConfidence::kFallback};
  throw AmbiguousDecisionError("no order quantity in the plausible range [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "] found in the response");
}

std::string AgentSpec::label() const {
  switch (kind) {
    case AgentKind::kLlm: return "llm:" + model_name;
    case AgentKind::kOptimal: return "optimal";
    case AgentKind::kMeanAnchor: return "mean-anchor(w=" + compact(anchor_weight) + ")";
    case AgentKind::kDemandChaser:
      if (switch_round > 0) {
        return "demand-chaser(alpha=" + compact(chase_rate_early) + "->" + compact(chase_rate) +
               "@" + std::to_string(switch_round) + ")";
      }
      return "demand-chaser(alpha=" + compact(chase_rate) + ")";
    case AgentKind::kRandom: return "random(seed=" + std::to_string(seed) + ")";
    case AgentKind::kFixture:
      return "fixture(" + compact(fixture_mean_high) + "/" + compact(fixture_mean_low) + ")";
  }
  return "?";
}

void AgentSpec::validate() const {
  switch (kind) {
    case AgentKind::kLlm:
      if (model_name.empty()) throw ConfigError("agent.model_name", "llm agents need a model name");
      if (!(temperature >= 0.0)) throw ConfigError("agent.temperature", "must be >= 0");
      if (parse_policy.max_retries < 0) {
        throw ConfigError("agent.parse_policy.max_retries", "must be >= 0");
      }
      break;
    case AgentKind::kMeanAnchor:
      if (!(anchor_weight >= 0.0 && anchor_weight <= 1.0)) {
        throw ConfigError("agent.anchor_weight", "must lie in [0, 1]");
      }
      break;
    case AgentKind::kDemandChaser:
      if (!(chase_rate >= 0.0) || !(chase_rate_early >= 0.0)) {
        throw ConfigError("agent.chase_rate", "must be >= 0");
      }
      break;
    case AgentKind::kFixture:
      if (!(fixture_mean_high >= 0.0) || !(fixture_mean_low >= 0.0)) {
        throw ConfigError("agent.fixture_mean", "must be >= 0");
      }
      break;
    case AgentKind::kOptimal:
    case AgentKind::kRandom:
      break;
  }
}

const std::vector<ChatMessage>& Agent::transcript() const {
  static const std::vector<ChatMessage> kEmpty;
  return kEmpty;
}

Decision decide_scripted(const AgentSpec& spec, const RoundContext& ctx) {
  const auto& sc = ctx.scenario;
  const int q_star = optimal_quantity(sc);
  const double anchor = sc.demand.mean();
  const int cap = plausible_upper(sc);
  Decision d;
  d.confidence = ParseConfidence::kExact;

  switch (spec.kind) {
    case AgentKind::kLlm:
      throw Error("decide_scripted called for an llm agent");
    case AgentKind::kOptimal:
      d.order = q_star;
      d.rationale = fmt::format(
          "optimal rule: order the critical-fractile quantity F^-1({}) = {}",
          compact(critical_fractile(sc.costs)), q_star);
      break;
    case AgentKind::kMeanAnchor: {
      const double target = anchor + spec.anchor_weight * (q_star - anchor);
      d.order = std::clamp(round_half_up(target), 0, cap);
      d.rationale = fmt::format(
          "mean-anchor rule: start at mean demand {} and move w={} of the way to {}, order {}",
          compact(anchor), compact(spec.anchor_weight), q_star, d.order);
      break;
    }
    case AgentKind::kDemandChaser: {
      if (ctx.round_index == 1 || !ctx.last_order || !ctx.last_demand) {
        d.order = spec.initial_order >= 0 ? std::clamp(spec.initial_order, 0, cap)
                                          : round_half_up(anchor);
        d.rationale = fmt::format("demand-chaser rule: open at {}", d.order);
        break;
      }
      const double alpha = (spec.switch_round > 0 && ctx.round_index < spec.switch_round)
                               ? spec.chase_rate_early
                               : spec.chase_rate;
      const int prev = *ctx.last_order;
      const int error = *ctx.last_demand - prev;
      int step = 0;
      if (alpha > 0.0 && error != 0) {
        const int size = std::max(1, round_half_up(alpha * std::abs(error)));
        step = error > 0 ? size : -size;
      }
      d.order = std::clamp(prev + step, 0, cap);
      d.rationale = fmt::format(
          "demand-chaser rule: last order {} missed demand {} by {}, move alpha={} toward it, order {}",
          prev, *ctx.last_demand, error, compact(alpha), d.order);
      break;
    }
    case AgentKind::kRandom: {
      const std::uint64_t block_seed = derive_seed(spec.seed, ctx.repetition, ctx.block_index);
      std::mt19937_64 engine(derive_seed(block_seed, ctx.round_index, 0));
      const std::uint64_t span = std::uint64_t(sc.demand.upper() - sc.demand.lower() + 1);
      // Multiply-shift keeps the mapping platform independent.
      const auto pick = std::uint64_t((unsigned __int128)engine() * span >> 64);
      d.order = sc.demand.lower() + int(pick);
      d.rationale = fmt::format("random rule: uniform pick on [{}, {}], order {}",
                                sc.demand.lower(), sc.demand.upper(), d.order);
      break;
    }
    case AgentKind::kFixture: {
      const double mean = sc.margin == Margin::kHigh ? spec.fixture_mean_high : spec.fixture_mean_low;
      const long long cents = std::llround(mean * 100.0);
      const long long k = (long long)ctx.repetition * sc.rounds + (ctx.round_index - 1);
      const auto floor_div = [](long long n) { return n >= 0 ? n / 100 : -((-n + 99) / 100); };
      d.order = int(floor_div((k + 1) * cents + 50) - floor_div(k * cents + 50));
      d.rationale = fmt::format("fixture rule: replay target mean order {}", compact(mean));
      break;
    }
  }
  d.raw_response = d.rationale;
  d.attempts = 0;
  return d;
}

namespace {

class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(AgentSpec spec) : spec_(std::move(spec)) {}
  Decision decide(const std::string& /*prompt*/, const RoundContext& ctx) override {
    return decide_scripted(spec_, ctx);
  }

 private:
  AgentSpec spec_;
};

}  // namespace

LlmAgent::LlmAgent(AgentSpec spec, std::shared_ptr<ChatClient> chat)
    : spec_(std::move(spec)), chat_(std::move(chat)) {
  if (!chat_) throw ConfigError("endpoint", "llm agents need a chat client");
}

void LlmAgent::set_transcript(std::vector<ChatMessage> transcript) {
  transcript_ = std::move(transcript);
}

Decision LlmAgent::decide(const std::string& prompt, const RoundContext& ctx) {
  ParsePolicy policy = spec_.parse_policy;
  if (policy.plausible_max <= 0) policy.plausible_max = plausible_upper(ctx.scenario);

  auto request = transcript_;
  request.push_back({"user", prompt});

  Decision d;
  d.attempts = 0;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    // Ambiguous replies are re-sampled from the same conversation.
    ChatResult reply = chat_->complete(spec_.model_name, request, spec_.temperature);
    ++d.attempts;
    d.transport_retries += reply.retries;
    d.usage.prompt_tokens += reply.usage.prompt_tokens;
    d.usage.completion_tokens += reply.usage.completion_tokens;
    d.usage.total_tokens += reply.usage.total_tokens;
    d.raw_response = reply.text;
    try {
      const auto extracted = extract_order(reply.text, policy);
      d.order = extracted.order;
      d.confidence = extracted.confidence;
      d.rationale = reply.text;
      transcript_ = std::move(request);
      transcript_.push_back({"assistant", reply.text});
      return d;
    } catch (const AmbiguousDecisionError& e) {
      if (attempt == policy.max_retries) throw AmbiguousDecisionError(e.what(), reply.text);
    }
  }
  throw AmbiguousDecisionError("unreachable");
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::shared_ptr<ChatClient> chat) {
  spec.validate();
  if (spec.kind == AgentKind::kLlm) return std::make_unique<LlmAgent>(spec, std::move(chat));
  return std::make_unique<ScriptedAgent>(spec);
}

}  // namespace nvlab
