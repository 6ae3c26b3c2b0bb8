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
// nvlab command-line tool: run, simulate, report, validate-prompts.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "nvlab/chat_client.hpp"
#include "nvlab/config.hpp"
#include "nvlab/error.hpp"
#include "nvlab/report.hpp"
#include "nvlab/serialization.hpp"
#include "nvlab/session.hpp"

namespace fs = std::filesystem;
using nvlab::ExitCode;

namespace {

struct RunFlags {
  std::string config_path;
  std::vector<std::string> experiments;
  std::vector<std::string> distributions;
  std::vector<std::string> agents;
  std::vector<std::string> order_conditions;
  std::optional<int> repetitions;
  std::optional<int> rounds;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<std::string> run_name;
  std::optional<std::string> endpoint;
  std::optional<std::string> credential_env;
  std::optional<int> workers;
  std::optional<double> temperature;
  bool no_continuity = false;
  bool print_config = false;
  std::string templates_dir;
  std::string resume_id;
  bool quiet = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool allow_resume) {
  cmd->add_option("--config", f.config_path, "JSON run configuration file");
  cmd->add_option("--experiment", f.experiments, "E1, E2 or E3 (repeatable)");
  cmd->add_option("--dist", f.distributions, "uniform, normal or lognormal (repeatable)");
  cmd->add_option("--agent", f.agents,
                  "optimal | random[:seed] | mean-anchor:W | demand-chaser:A | "
                  "demand-chaser:A0->A1@ROUND | fixture:HIGH/LOW | llm:MODEL (repeatable)");
  cmd->add_option("--order-condition", f.order_conditions, "high-first or low-first (repeatable)");
  cmd->add_option("--repetitions", f.repetitions, "repetitions per condition");
  cmd->add_option("--rounds", f.rounds, "rounds per scenario block");
  cmd->add_option("--seed", f.seed, "base seed for demand sequences");
  cmd->add_option("--output-dir", f.output_dir, "run store root");
  cmd->add_option("--run-name", f.run_name, "run id (default: derived from the plan hash)");
  cmd->add_option("--endpoint", f.endpoint, "chat-completions URL");
  cmd->add_option("--credential-env", f.credential_env, "environment variable holding the API key");
  cmd->add_option("--workers", f.workers, "concurrent repetitions");
  cmd->add_option("--temperature", f.temperature, "sampling temperature for llm agents");
  cmd->add_flag("--no-transcript-continuity", f.no_continuity,
                "start a fresh conversation for the second block");
  cmd->add_flag("--print-config", f.print_config, "print the resolved config and plans, then exit");
  cmd->add_option("--templates", f.templates_dir, "prompt template directory");
  cmd->add_flag("--quiet", f.quiet, "no progress output");
  if (allow_resume) cmd->add_option("--resume", f.resume_id, "continue a stored run by id");
}

nvlab::RunConfig resolve(const RunFlags& f) {
  nvlab::RunConfig c = f.config_path.empty() ? nvlab::RunConfig{} : nvlab::load_run_config(f.config_path);
  if (!f.experiments.empty()) c.experiments = f.experiments;
  if (!f.distributions.empty()) c.distributions = f.distributions;
  if (!f.agents.empty()) c.agents = f.agents;
  if (!f.order_conditions.empty()) c.order_conditions = f.order_conditions;
  if (f.repetitions) c.repetitions = *f.repetitions;
  if (f.rounds) c.rounds = *f.rounds;
  if (f.seed) c.seed = *f.seed;
  if (f.output_dir) c.output_dir = *f.output_dir;
  if (f.run_name) c.run_name = *f.run_name;
  if (f.endpoint) c.endpoint = *f.endpoint;
  if (f.credential_env) c.credential_env = *f.credential_env;
  if (f.workers) c.workers = *f.workers;
  if (f.temperature) c.temperature = *f.temperature;
  if (f.no_continuity) c.transcript_continuity = false;
  c.validate();
  return c;
}

nvlab::PromptTemplateSet load_templates(const std::string& dir) {
  return dir.empty() ? nvlab::PromptTemplateSet::load_default() : nvlab::PromptTemplateSet::load(dir);
}

std::shared_ptr<nvlab::ChatClient> make_client(const nvlab::RunConfig& c, const fs::path& run_dir) {
  const char* key = std::getenv(c.credential_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw nvlab::ConfigError("credential_env",
                             "environment variable " + c.credential_env + " is not set");
  }
  nvlab::HttpChatOptions o;
  o.endpoint = c.endpoint;
  o.api_key = key;
  o.retry.max_retries = c.transport.max_retries;
  o.retry.base_delay = std::chrono::milliseconds(c.transport.base_delay_ms);
  o.retry.max_delay = std::chrono::milliseconds(c.transport.max_delay_ms);
  o.timeout = std::chrono::seconds(c.transport.timeout_s);
  if (c.transport.requests_per_second > 0) {
    o.rate_limiter = std::make_shared<nvlab::RateLimiter>(c.transport.requests_per_second, c.transport.burst);
  }
  o.budget = std::make_shared<nvlab::RequestBudget>(c.transport.request_budget);
  fs::create_directories(run_dir);
  o.log = std::make_shared<nvlab::RequestLog>(run_dir / "requests.jsonl");
  return std::make_shared<nvlab::HttpChatClient>(std::move(o));
}

int execute(const RunFlags& f, bool simulate) {
  const auto templates = load_templates(f.templates_dir);
  nvlab::RunConfig config = resolve(f);
  if (simulate && nvlab::has_llm_agent(config)) {
    throw nvlab::ConfigError("agents", "simulate runs scripted agents only; use `run` for llm agents");
  }
  std::vector<nvlab::ExperimentPlan> plans;
  if (!f.resume_id.empty()) {
    auto store = nvlab::RunStore::open(config.output_dir, f.resume_id);
    plans.push_back(store->manifest().plan);
  } else {
    plans = nvlab::build_plans(config, templates.digest());
  }

  if (f.print_config) {
    nlohmann::json out{{"config", nvlab::to_json(config)}, {"plans", nlohmann::json::array()}};
    for (const auto& p : plans) {
      out["plans"].push_back({{"run_id", p.run_id},
                              {"plan_hash", nvlab::plan_hash(p)},
                              {"total_blocks", p.total_blocks()},
                              {"total_rounds", p.total_rounds()},
                              {"plan", p}});
    }
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  int exit_code = 0;
  for (const auto& plan : plans) {
    nvlab::RunOptions options;
    options.store_root = config.output_dir;
    options.workers = config.workers;
    bool needs_chat = false;
    for (const auto& c : plan.conditions) needs_chat = needs_chat || c.agent.kind == nvlab::AgentKind::kLlm;
    if (needs_chat) options.chat = make_client(config, fs::path(config.output_dir) / plan.run_id);
    if (!f.quiet) {
      options.on_progress = [&plan](const nvlab::ProgressEvent& e) {
        if (e.block_complete) {
          std::cerr << fmt::format("[{}/{}] {} {} done\n", e.rounds_done, e.rounds_total, plan.run_id,
                                   e.key.id());
        }
      };
    }
    const auto result = nvlab::run_plan(plan, templates, options);
    std::cout << result.run_id << '\n';
    if (result.incomplete > 0) {
      std::cerr << fmt::format("{}: {} incomplete trajectories ({} transport, {} ambiguous, {} other errors)\n",
                               result.run_id, result.incomplete, result.transport_errors,
                               result.ambiguous_errors, result.other_errors);
      const ExitCode code = result.transport_errors > 0   ? ExitCode::kTransport
                            : result.ambiguous_errors > 0 ? ExitCode::kParseAmbiguity
                                                          : ExitCode::kOther;
      if (exit_code == 0) exit_code = int(code);
    }
  }
  return exit_code;
}

struct ReportFlags {
  std::vector<std::string> run_ids;
  std::string runs_dir = "runs";
  std::string output_dir = "report";
  bool compare_humans = false;
  bool mas_printed = false;
  bool pooled_slopes = false;
  bool include_incomplete = false;
  std::string templates_dir;
};

int report(const ReportFlags& f) {
  const auto templates = load_templates(f.templates_dir);
  std::vector<nvlab::ReportInput> inputs;
  for (const auto& id : f.run_ids) {
    inputs.push_back({id, nvlab::load_trajectories(f.runs_dir, id, templates)});
  }
  nvlab::ReportOptions options;
  options.compare_humans = f.compare_humans;
  options.pooled_slopes = f.pooled_slopes;
  options.include_incomplete = f.include_incomplete;
  if (f.mas_printed) options.mas_orientation = nvlab::MasOrientation::kPrinted;
  const auto bundle = nvlab::build_report(inputs, options);
  nvlab::write_report(bundle, f.output_dir);
  for (const auto& [name, content] : bundle.files) std::cout << (fs::path(f.output_dir) / name).string() << '\n';
  return 0;
}

int validate_prompts(const std::string& templates_dir, const std::string& golden_dir) {
  const auto templates = load_templates(templates_dir);
  const fs::path golden = golden_dir.empty() ? nvlab::default_asset_dir() / "golden" : fs::path(golden_dir);
  const auto mismatches = nvlab::validate_prompts(templates, golden);
  for (const auto& c : nvlab::golden_cases()) {
    bool bad = false;
    for (const auto& m : mismatches) {
      if (m.name != c.name) continue;
      bad = true;
      std::cout << fmt::format("FAIL {}: first difference at byte {} (line {})\n", m.name, m.offset, m.line);
      std::cout << "  expected: " << m.expected_line << '\n';
      std::cout << "  actual:   " << m.actual_line << '\n';
    }
    if (!bad) std::cout << "ok   " << c.name << '\n';
  }
  return mismatches.empty() ? 0 : int(ExitCode::kValidation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nvlab: newsvendor experiments for LLM and scripted agents"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run a plan (llm or scripted agents)");
  add_run_flags(run_cmd, run_flags, true);

  RunFlags sim_flags;
  auto* sim_cmd = app.add_subcommand("simulate", "run scripted agents offline");
  add_run_flags(sim_cmd, sim_flags, false);

  ReportFlags report_flags;
  auto* report_cmd = app.add_subcommand("report", "compute tables and figure data from stored runs");
  report_cmd->add_option("run_ids", report_flags.run_ids, "run ids")->required();
  report_cmd->add_option("--runs-dir", report_flags.runs_dir, "run store root");
  report_cmd->add_option("--output-dir", report_flags.output_dir, "report directory");
  report_cmd->add_flag("--compare-humans", report_flags.compare_humans, "add human reference rows");
  report_cmd->add_flag("--mas-printed", report_flags.mas_printed, "use the reciprocal MAS orientation");
  report_cmd->add_flag("--pooled-slopes", report_flags.pooled_slopes,
                       "fit learning slopes on pooled repetitions");
  report_cmd->add_flag("--include-incomplete", report_flags.include_incomplete,
                       "keep incomplete trajectories");
  report_cmd->add_option("--templates", report_flags.templates_dir, "prompt template directory");

  std::string vp_templates, vp_golden;
  auto* vp_cmd = app.add_subcommand("validate-prompts", "diff rendered prompts against golden files");
  vp_cmd->add_option("--templates", vp_templates, "prompt template directory");
  vp_cmd->add_option("--golden", vp_golden, "golden prompt directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : int(ExitCode::kConfig);
  }

  try {
    if (*run_cmd) return execute(run_flags, false);
    if (*sim_cmd) return execute(sim_flags, true);
    if (*report_cmd) return report(report_flags);
    if (*vp_cmd) return validate_prompts(vp_templates, vp_golden);
  } catch (const nvlab::Error& e) {
    std::cerr << "nvlab: " << e.what() << '\n';
    return int(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "nvlab: " << e.what() << '\n';
    return int(ExitCode::kOther);
  }
  return 0;
}
