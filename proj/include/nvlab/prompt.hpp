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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nvlab/newsvendor.hpp"

namespace nvlab {

// Substitutes {name} placeholders. Every placeholder in `text` must have a
// value; otherwise a TemplateError naming the variable is thrown. Unused
// values are ignored.
std::string substitute(std::string_view text, const std::map<std::string, std::string>& values);

// Prompt text assets. Loaded from a directory of UTF-8 files; each file's
// single trailing newline is dropped on load.
struct PromptTemplateSet {
  std::string base_baseline;   // experiment 1
  std::string base_formula;    // experiments 2 and 3
  std::string history_block;
  std::string feedback_summary;
  std::map<Experiment, std::string> formula_blocks;
  std::map<DemandKind, std::string> distribution_descriptions;
  std::map<DemandKind, std::string> distribution_formulas;

  static PromptTemplateSet load(const std::filesystem::path& dir);
  // Default asset directory: $NVLAB_ASSET_DIR/templates, else the source tree.
  static PromptTemplateSet load_default();

  // SHA-256 over every asset in a fixed order; recorded in run manifests.
  std::string digest() const;
};

std::filesystem::path default_asset_dir();

struct RoundOutcome {
  int order = 0;
  int demand = 0;
  double profit = 0.0;
  double cumulative_profit = 0.0;
};

struct RoundContext {
  ScenarioConfig scenario;
  int round_index = 1;  // 1-based within the scenario block
  std::optional<int> last_order;
  std::optional<int> last_demand;
  std::optional<double> last_profit;
  double cumulative_profit = 0.0;
  // Position of the block in the plan; scripted agents use it for seeding.
  int repetition = 0;
  int block_index = 1;

  // Round 1 has no last_* fields; later rounds have all of them.
  void validate() const;
};

// Integers print plainly; other values print with at most two decimals.
std::string format_number(double value);

std::string render_prompt(const RoundContext& ctx, const PromptTemplateSet& templates);

enum class FeedbackStyle {
  kHistoryBlock,  // the block embedded in prompts from round 2 on
  kSummary,       // the short "Results of the previous round." box
};

std::string render_feedback(const RoundOutcome& last, const PromptTemplateSet& templates,
                            FeedbackStyle style = FeedbackStyle::kHistoryBlock);

// Hex SHA-256 of a prompt string.
std::string prompt_hash(std::string_view prompt);

// The three reference contexts with known complete prompts.
struct GoldenCase {
  std::string name;  // golden file stem
  RoundContext context;
};
std::vector<GoldenCase> golden_cases();

struct GoldenMismatch {
  std::string name;
  std::size_t offset = 0;  // first differing byte
  int line = 0;            // 1-based line of that byte
  std::string expected_line;
  std::string actual_line;
};

// Renders every golden case and compares with `<golden_dir>/<name>.txt`.
// Throws AssetError when a golden file is missing.
std::vector<GoldenMismatch> validate_prompts(const PromptTemplateSet& templates,
                                             const std::filesystem::path& golden_dir);

}  // namespace nvlab
