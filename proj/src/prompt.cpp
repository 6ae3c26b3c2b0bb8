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
#include "nvlab/prompt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "nvlab/error.hpp"

#ifndef NVLAB_SOURCE_ASSET_DIR
#define NVLAB_SOURCE_ASSET_DIR "assets"
#endif

namespace nvlab {
namespace {

std::string read_asset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AssetError("missing asset file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

std::string one_decimal(double value) { return fmt::format("{:.1f}", value); }

}  // namespace

std::string substitute(std::string_view text, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(text.size() + 64);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t open = text.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      break;
    }
    const std::size_t close = text.find('}', open + 1);
    if (close == std::string_view::npos) {
      throw TemplateError("", "unterminated placeholder at offset " + std::to_string(open));
    }
    out.append(text.substr(pos, open - pos));
    const std::string name(text.substr(open + 1, close - open - 1));
    const auto it = values.find(name);
    if (it == values.end()) {
      throw TemplateError(name, "template variable '" + name + "' has no value");
    }
    out.append(it->second);
    pos = close + 1;
  }
  return out;
}

std::filesystem::path default_asset_dir() {
  if (const char* env = std::getenv("NVLAB_ASSET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return NVLAB_SOURCE_ASSET_DIR;
}

PromptTemplateSet PromptTemplateSet::load(const std::filesystem::path& dir) {
  PromptTemplateSet t;
  t.base_baseline = read_asset(dir / "base_baseline.txt");
  t.base_formula = read_asset(dir / "base_formula.txt");
  t.history_block = read_asset(dir / "history_block.txt");
  t.feedback_summary = read_asset(dir / "feedback_summary.txt");
  t.formula_blocks[Experiment::kFormula] = read_asset(dir / "formula_block_E2.txt");
  t.formula_blocks[Experiment::kRiskNeutral] = read_asset(dir / "formula_block_E3.txt");
  for (const auto kind :
       {DemandKind::kUniform, DemandKind::kTruncatedNormal, DemandKind::kLognormal}) {
    const std::string stem(to_string(kind));
    t.distribution_descriptions[kind] = read_asset(dir / ("demand_" + stem + ".txt"));
    t.distribution_formulas[kind] = read_asset(dir / ("formula_" + stem + ".txt"));
  }
  return t;
}

PromptTemplateSet PromptTemplateSet::load_default() {
  return load(default_asset_dir() / "templates");
}

std::string PromptTemplateSet::digest() const {
  std::string all;
  const auto add = [&all](std::string_view s) {
    all.append(std::to_string(s.size()));
    all.push_back(':');
    all.append(s);
  };
  add(base_baseline);
  add(base_formula);
  add(history_block);
  add(feedback_summary);
  for (const auto& [k, v] : formula_blocks) add(v);
  for (const auto& [k, v] : distribution_descriptions) add(v);
  for (const auto& [k, v] : distribution_formulas) add(v);
  return prompt_hash(all);
}

void RoundContext::validate() const {
  if (round_index < 1) throw InvalidScenarioError("round_index must be >= 1");
  const bool any = last_order || last_demand || last_profit;
  const bool all = last_order && last_demand && last_profit;
  if (round_index == 1 && any) {
    throw InvalidScenarioError("round 1 context must not carry previous-round fields");
  }
  if (round_index > 1 && !all) {
    throw InvalidScenarioError("rounds after the first need order, demand and profit feedback");
  }
}

std::string format_number(double value) {
  if (std::nearbyint(value) == value && std::fabs(value) < 9.0e15) {
    return fmt::format("{}", static_cast<long long>(value));
  }
  std::string s = fmt::format("{:.2f}", value);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string render_prompt(const RoundContext& ctx, const PromptTemplateSet& templates) {
  ctx.validate();
  const auto& sc = ctx.scenario;
  const auto& dist = sc.demand;

  std::map<std::string, std::string> vars;
  vars["price"] = format_number(sc.costs.price);
  vars["cost"] = format_number(sc.costs.cost);
  vars["a"] = std::to_string(dist.lower());
  vars["b"] = std::to_string(dist.upper());
  vars["mean"] = one_decimal(dist.mean());
  vars["std"] = one_decimal(dist.kind() == DemandKind::kTruncatedNormal ? dist.scale() : 0.0);

  vars["demand_description"] = substitute(templates.distribution_descriptions.at(dist.kind()), vars);

  if (ctx.round_index > 1) {
    RoundOutcome last{*ctx.last_order, *ctx.last_demand, *ctx.last_profit, ctx.cumulative_profit};
    vars["history_block"] = render_feedback(last, templates) + "\n";
  } else {
    vars["history_block"] = "";
  }

  if (sc.experiment == Experiment::kBaseline) {
    vars["formula_block"] = "";
  } else {
    vars["distribution_formula"] = substitute(templates.distribution_formulas.at(dist.kind()), vars);
    vars["formula_block"] = substitute(templates.formula_blocks.at(sc.experiment), vars) + "\n\n";
  }

  const std::string& base =
      sc.experiment == Experiment::kBaseline ? templates.base_baseline : templates.base_formula;
  return substitute(base, vars);
}

std::string render_feedback(const RoundOutcome& last, const PromptTemplateSet& templates,
                            FeedbackStyle style) {
  const std::map<std::string, std::string> vars{
      {"last_order", std::to_string(last.order)},
      {"last_demand", std::to_string(last.demand)},
      {"last_profit", format_number(last.profit)},
      {"cumulative_profit", format_number(last.cumulative_profit)},
  };
  return substitute(
      style == FeedbackStyle::kHistoryBlock ? templates.history_block : templates.feedback_summary,
      vars);
}

std::string prompt_hash(std::string_view prompt) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(prompt.data(), prompt.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::vector<GoldenCase> golden_cases() {
  std::vector<GoldenCase> cases;

  RoundContext e1;
  e1.scenario = make_scenario(Experiment::kBaseline, DemandKind::kUniform, Margin::kHigh);
  cases.push_back({"ec_e1_high_uniform_round1", e1});

  RoundContext e2;
  e2.scenario = make_scenario(Experiment::kFormula, DemandKind::kTruncatedNormal, Margin::kLow);
  e2.round_index = 5;
  e2.last_order = 120;
  e2.last_demand = 85;
  e2.last_profit = 255;
  e2.cumulative_profit = 1450;
  cases.push_back({"ec_e2_low_normal_round5", e2});

  RoundContext e3;
  e3.scenario = make_scenario(Experiment::kRiskNeutral, DemandKind::kUniform, Margin::kHigh);
  cases.push_back({"ec_e3_high_uniform_round1", e3});
  return cases;
}

std::vector<GoldenMismatch> validate_prompts(const PromptTemplateSet& templates,
                                             const std::filesystem::path& golden_dir) {
  std::vector<GoldenMismatch> mismatches;
  for (const auto& gc : golden_cases()) {
    const std::string expected = read_asset(golden_dir / (gc.name + ".txt"));
    const std::string actual = render_prompt(gc.context, templates);
    if (expected == actual) continue;

    std::size_t i = 0;
    while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
    GoldenMismatch m;
    m.name = gc.name;
    m.offset = i;
    m.line = 1 + int(std::count(expected.begin(), expected.begin() + long(i), '\n'));
    const auto line_at = [](const std::string& s, std::size_t at) {
      at = std::min(at, s.size());
      const std::size_t start = s.rfind('\n', at == 0 ? 0 : at - 1);
      const std::size_t from = (start == std::string::npos || at == 0) ? 0 : start + 1;
      const std::size_t end = s.find('\n', at);
      return s.substr(from, end == std::string::npos ? std::string::npos : end - from);
    };
    m.expected_line = line_at(expected, i);
    m.actual_line = line_at(actual, i);
    mismatches.push_back(std::move(m));
  }
  return mismatches;
}

}  // namespace nvlab
