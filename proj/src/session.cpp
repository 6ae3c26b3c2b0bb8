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
#include "nvlab/session.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "nvlab/error.hpp"
#include "nvlab/serialization.hpp"

namespace nvlab {
namespace {

struct Unit {
  int condition = 0;
  int repetition = 0;
};

// Sorts stored rounds into one trajectory per planned block and checks them.
std::vector<Trajectory> verify(const RunManifest& manifest, const StoreContents& contents,
                               const PromptTemplateSet& templates) {
  const auto& plan = manifest.plan;
  std::map<TrajectoryKey, std::vector<const StoredRound*>> grouped;
  for (const auto& r : contents.rounds) grouped[r.key].push_back(&r);

  std::vector<Trajectory> out;
  for (int c = 0; c < int(plan.conditions.size()); ++c) {
    const auto& cond = plan.conditions[c];
    for (int rep = 0; rep < cond.repetitions; ++rep) {
      for (int block = 1; block <= 2; ++block) {
        Trajectory t;
        t.run_id = plan.run_id;
        t.key = {c, rep, block};
        t.agent = cond.agent;
        t.scenario = cond.block_scenario(block);
        t.order_condition = cond.order_condition;
        const auto seq = sample_sequence(t.scenario.demand, t.scenario.rounds,
                                         derive_seed(cond.base_seed, rep, block));
        auto it = grouped.find(t.key);
        if (it != grouped.end()) {
          auto rows = it->second;
          std::stable_sort(rows.begin(), rows.end(), [](const StoredRound* a, const StoredRound* b) {
            return a->record.round_index < b->record.round_index;
          });
          double cumulative = 0.0;
          for (const StoredRound* row : rows) {
            const auto& rec = row->record;
            const auto fail = [&](const std::string& what) {
              throw IntegrityError("rounds.jsonl line " + std::to_string(row->line) + " (" +
                                   t.key.id() + " round " + std::to_string(rec.round_index) +
                                   "): " + what);
            };
            const int expected_round = int(t.rounds.size()) + 1;
            if (rec.round_index != expected_round) {
              fail(rec.round_index < expected_round ? "duplicate round"
                                                    : "gap before this round");
            }
            if (rec.round_index > t.scenario.rounds) fail("round beyond the block length");
            if (rec.demand != seq.draws[rec.round_index - 1]) {
              fail("demand does not match the seeded sequence");
            }
            if (rec.order < 0) fail("negative order");
            if (rec.profit != profit(rec.order, rec.demand, t.scenario.costs)) {
              fail("stored profit disagrees with the recomputed profit");
            }
            cumulative += rec.profit;
            if (rec.cumulative_profit != cumulative) fail("cumulative profit is not the running sum");
            const auto ctx = context_for(t.scenario, t.rounds, rep, block);
            if (prompt_hash(render_prompt(ctx, templates)) != rec.prompt_hash) {
              fail("prompt hash does not match the re-rendered prompt");
            }
            t.rounds.push_back(rec);
          }
          grouped.erase(it);
        }
        t.complete = int(t.rounds.size()) == t.scenario.rounds;
        out.push_back(std::move(t));
      }
    }
  }
  if (!grouped.empty()) {
    const auto* row = grouped.begin()->second.front();
    throw IntegrityError("rounds.jsonl line " + std::to_string(row->line) + ": trajectory " +
                         row->key.id() + " is not part of the plan");
  }
  return out;
}

std::vector<ChatMessage> rebuild_transcript(const PlanCondition& cond, int rep,
                                            const std::vector<const Trajectory*>& blocks,
                                            const PromptTemplateSet& templates,
                                            bool continuity) {
  std::vector<ChatMessage> transcript;
  for (const Trajectory* t : blocks) {
    if (!continuity) transcript.clear();
    std::vector<RoundRecord> prior;
    for (const auto& rec : t->rounds) {
      const auto ctx = context_for(cond.block_scenario(t->key.block_index), prior, rep,
                                   t->key.block_index);
      transcript.push_back({"user", render_prompt(ctx, templates)});
      transcript.push_back({"assistant", rec.raw_response});
      prior.push_back(rec);
    }
  }
  return transcript;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const AmbiguousDecisionError*>(&e)) return "ambiguous";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  return "other";
}

}  // namespace

std::string default_run_id(const ExperimentPlan& plan) {
  ExperimentPlan copy = plan;
  copy.run_id.clear();
  return "run-" + plan_hash(copy).substr(0, 12);
}

RoundContext context_for(const ScenarioConfig& scenario, const std::vector<RoundRecord>& prior,
                         int repetition, int block_index) {
  RoundContext ctx;
  ctx.scenario = scenario;
  ctx.round_index = int(prior.size()) + 1;
  ctx.repetition = repetition;
  ctx.block_index = block_index;
  if (!prior.empty()) {
    const auto& last = prior.back();
    ctx.last_order = last.order;
    ctx.last_demand = last.demand;
    ctx.last_profit = last.profit;
    ctx.cumulative_profit = last.cumulative_profit;
  }
  return ctx;
}

std::vector<Trajectory> build_trajectories(const RunManifest& manifest, const StoreContents& contents,
                                           const PromptTemplateSet& templates) {
  if (templates.digest() != manifest.template_digest) {
    throw IntegrityError("template digest differs from the one recorded in the run manifest");
  }
  return verify(manifest, contents, templates);
}

std::vector<Trajectory> load_trajectories(const std::filesystem::path& store_root,
                                          const std::string& run_id,
                                          const PromptTemplateSet& templates) {
  const auto store = RunStore::open(store_root, run_id);
  return build_trajectories(store->manifest(), store->read(), templates);
}

RunResult run_plan(ExperimentPlan plan, const PromptTemplateSet& templates, const RunOptions& options) {
  const std::string digest = templates.digest();
  if (plan.template_digest.empty()) plan.template_digest = digest;
  if (plan.template_digest != digest) {
    throw IntegrityError("plan template digest does not match the loaded templates");
  }
  if (plan.run_id.empty()) plan.run_id = default_run_id(plan);
  plan.validate();
  if (options.workers < 1) throw ConfigError("workers", "must be >= 1");
  for (const auto& c : plan.conditions) {
    if (c.agent.kind == AgentKind::kLlm && !options.chat) {
      throw ConfigError("endpoint", "plan has llm agents but no chat client is configured");
    }
  }

  RunResult result;
  result.run_id = plan.run_id;
  const std::string hash = plan_hash(plan);
  std::unique_ptr<RunStore> store;
  if (RunStore::exists(options.store_root, plan.run_id)) {
    store = RunStore::open(options.store_root, plan.run_id);
    if (store->manifest().plan_hash != hash) {
      throw IntegrityError("run '" + plan.run_id + "' exists with plan hash " +
                           store->manifest().plan_hash + " but this plan hashes to " + hash);
    }
    result.resumed = true;
  } else {
    store = RunStore::create(options.store_root, RunManifest{plan, hash, digest});
  }

  std::vector<Trajectory> existing = verify(store->manifest(), store->read(), templates);
  std::map<TrajectoryKey, const Trajectory*> by_key;
  for (const auto& t : existing) by_key[t.key] = &t;

  std::vector<Unit> units;
  for (int c = 0; c < int(plan.conditions.size()); ++c) {
    for (int rep = 0; rep < plan.conditions[c].repetitions; ++rep) units.push_back({c, rep});
  }

  const int total = plan.total_rounds();
  std::atomic<int> done{0};
  for (const auto& t : existing) done += int(t.rounds.size());
  std::atomic<int> new_rounds{0};
  std::atomic<bool> stop{false};
  std::atomic<int> transport_errors{0}, ambiguous_errors{0}, other_errors{0};
  std::mutex result_mutex;
  std::map<TrajectoryKey, Trajectory> finished;
  std::mutex progress_mutex;

  const auto run_unit = [&](const Unit& u) {
    const auto& cond = plan.conditions[u.condition];
    auto agent = make_agent(cond.agent, options.chat);
    std::vector<const Trajectory*> stored_blocks = {by_key.at({u.condition, u.repetition, 1}),
                                                    by_key.at({u.condition, u.repetition, 2})};
    if (cond.agent.kind == AgentKind::kLlm) {
      // Blocks after the first unfinished one cannot have rounds yet.
      std::vector<const Trajectory*> prefix;
      for (const auto* t : stored_blocks) {
        prefix.push_back(t);
        if (!t->complete) break;
      }
      agent->set_transcript(
          rebuild_transcript(cond, u.repetition, prefix, templates, plan.transcript_continuity));
    }

    bool failed = false;
    for (int block = 1; block <= 2; ++block) {
      Trajectory traj = *stored_blocks[block - 1];
      const auto& sc = traj.scenario;
      if (!failed && !traj.complete) {
        if (block == 2 && !plan.transcript_continuity && traj.rounds.empty()) agent->set_transcript({});
        const auto seq = sample_sequence(sc.demand, sc.rounds, derive_seed(cond.base_seed, u.repetition, block));
        while (int(traj.rounds.size()) < sc.rounds) {
          if (stop.load()) {
            failed = true;
            break;
          }
          const auto ctx = context_for(sc, traj.rounds, u.repetition, block);
          const std::string prompt = render_prompt(ctx, templates);
          RoundRecord rec;
          rec.round_index = ctx.round_index;
          rec.prompt_hash = prompt_hash(prompt);
          rec.started_at = utc_timestamp();
          Decision d;
          try {
            d = agent->decide(prompt, ctx);
          } catch (const Error& e) {
            const auto* amb = dynamic_cast<const AmbiguousDecisionError*>(&e);
            const std::string kind = error_kind(e);
            store->append_error({traj.key, ctx.round_index, kind, e.what(),
                                 amb ? amb->raw_response() : std::string()});
            ++(kind == "transport" ? transport_errors : kind == "ambiguous" ? ambiguous_errors : other_errors);
            failed = true;
            break;
          }
          rec.finished_at = utc_timestamp();
          rec.raw_response = d.raw_response;
          rec.rationale = d.rationale;
          rec.order = d.order;
          rec.demand = seq.draws[ctx.round_index - 1];
          rec.profit = profit(rec.order, rec.demand, sc.costs);
          rec.cumulative_profit = ctx.cumulative_profit + rec.profit;
          rec.parse_confidence = d.confidence;
          rec.attempts = d.attempts;
          rec.transport_retries = d.transport_retries;
          rec.token_usage = d.usage;
          store->append_round(traj.key, cond, rec);
          traj.rounds.push_back(std::move(rec));
          const int n = ++new_rounds;
          const int all = ++done;
          if (options.max_new_rounds >= 0 && n >= options.max_new_rounds) stop = true;
          if (options.on_progress) {
            std::lock_guard lock(progress_mutex);
            options.on_progress({traj.key, all, total, int(traj.rounds.size()) == sc.rounds});
          }
        }
        traj.complete = int(traj.rounds.size()) == sc.rounds;
      }
      if (!traj.complete) failed = true;
      std::lock_guard lock(result_mutex);
      finished[traj.key] = std::move(traj);
    }
  };

  if (options.workers == 1 || units.size() <= 1) {
    for (const auto& u : units) run_unit(u);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int n = std::min<int>(options.workers, int(units.size()));
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
          try {
            run_unit(units[i]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            stop = true;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  for (auto& [key, traj] : finished) {
    if (!traj.complete) ++result.incomplete;
    result.trajectories.push_back(std::move(traj));
  }
  result.new_rounds = new_rounds.load();
  result.transport_errors = transport_errors.load();
  result.ambiguous_errors = ambiguous_errors.load();
  result.other_errors = other_errors.load();
  return result;
}

RunResult resume(const std::string& run_id, const PromptTemplateSet& templates,
                 const RunOptions& options) {
  const auto store = RunStore::open(options.store_root, run_id);
  ExperimentPlan plan = store->manifest().plan;
  return run_plan(std::move(plan), templates, options);
}

}  // namespace nvlab
