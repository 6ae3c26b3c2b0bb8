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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nvlab/agents.hpp"
#include "nvlab/prompt.hpp"
#include "nvlab/records.hpp"
#include "nvlab/run_store.hpp"

namespace nvlab {

struct ProgressEvent {
  TrajectoryKey key;
  int rounds_done = 0;   // resolved rounds in the whole run so far
  int rounds_total = 0;
  bool block_complete = false;
};

struct RunOptions {
  std::filesystem::path store_root = "runs";
  // Units (condition, repetition) run concurrently on this many threads.
  int workers = 1;
  // Required when the plan contains llm agents.
  std::shared_ptr<ChatClient> chat;
  std::function<void(const ProgressEvent&)> on_progress;
  // Stop after this many newly resolved rounds (< 0: no limit). Lets tests
  // interrupt a run at a known point.
  int max_new_rounds = -1;
};

struct RunResult {
  std::string run_id;
  std::vector<Trajectory> trajectories;  // sorted by key, complete or not
  int new_rounds = 0;
  int incomplete = 0;
  bool resumed = false;  // the store already existed
  int transport_errors = 0;
  int ambiguous_errors = 0;
  int other_errors = 0;
};

// "run-" plus the first 12 hex digits of the hash of the plan without its run_id.
std::string default_run_id(const ExperimentPlan& plan);

// Runs every block that is not yet complete. Called on an existing store with
// the same plan it continues where the store stops; a different plan hash or
// template digest raises IntegrityError.
RunResult run_plan(ExperimentPlan plan, const PromptTemplateSet& templates, const RunOptions& options);

// Reloads the plan from the store manifest and continues it.
RunResult resume(const std::string& run_id, const PromptTemplateSet& templates,
                 const RunOptions& options);

// Rebuilds every trajectory of a stored run and checks it against the plan:
// demand draws, recomputed profit, running cumulative profit, contiguous round
// indexes and re-rendered prompt hashes. Throws IntegrityError naming the
// offending line.
std::vector<Trajectory> load_trajectories(const std::filesystem::path& store_root,
                                          const std::string& run_id,
                                          const PromptTemplateSet& templates);

// Same checks over already-read contents.
std::vector<Trajectory> build_trajectories(const RunManifest& manifest, const StoreContents& contents,
                                           const PromptTemplateSet& templates);

// Round context for round `round_index` given the rounds before it.
RoundContext context_for(const ScenarioConfig& scenario, const std::vector<RoundRecord>& prior,
                         int repetition, int block_index);

}  // namespace nvlab
