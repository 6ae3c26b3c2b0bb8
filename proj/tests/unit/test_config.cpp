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
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "nvlab/config.hpp"
#include "nvlab/error.hpp"
#include "nvlab/serialization.hpp"
#include "nvlab/session.hpp"

using namespace nvlab;
namespace fs = std::filesystem;

namespace {

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults validate and round-trip through JSON") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(run_config_from_json(to_json(c)) == c);

  c.agents = {"optimal", "llm:gpt-4o", "demand-chaser:0->1@8"};
  c.experiments = {"E2"};
  c.seed = 7;
  c.workers = 3;
  c.lognormal_log_mean = 5.1;
  c.lognormal_log_sd = 0.2;
  c.transport.requests_per_second = 2.5;
  c.transcript_continuity = false;
  CHECK(run_config_from_json(to_json(c)) == c);

  const fs::path path = fs::temp_directory_path() / "nvlab_config_roundtrip.json";
  std::ofstream(path) << to_json(c).dump(2);
  CHECK(load_run_config(path) == c);
}

TEST_CASE("config errors name the field") {
  CHECK(field_of([] { run_config_from_json(nlohmann::json{{"repetitons", 3}}); }) == "repetitons");
  CHECK(field_of([] { run_config_from_json(nlohmann::json{{"transport", {{"retries", 1}}}}); }) ==
        "transport.retries");
  CHECK(field_of([] { run_config_from_json(nlohmann::json::array()); }) == "<root>");
  CHECK(field_of([] { run_config_from_json(nlohmann::json{{"lognormal", {{"log_mean", 5.0}}}}); }) ==
        "lognormal");
  const auto invalid = [](auto mutate) {
    RunConfig c;
    mutate(c);
    return field_of([&] { c.validate(); });
  };
  CHECK(invalid([](RunConfig& c) { c.repetitions = 0; }) == "repetitions");
  CHECK(invalid([](RunConfig& c) { c.rounds = 0; }) == "rounds");
  CHECK(invalid([](RunConfig& c) { c.workers = 0; }) == "workers");
  CHECK(invalid([](RunConfig& c) { c.experiments = {"E4"}; }) == "experiments");
  CHECK(invalid([](RunConfig& c) { c.distributions = {"pareto"}; }) == "distributions");
  CHECK(invalid([](RunConfig& c) { c.order_conditions = {"random"}; }) == "order_conditions");
  CHECK(invalid([](RunConfig& c) { c.agents = {"mean-anchor:2"}; }) == "agent.anchor_weight");
  CHECK(invalid([](RunConfig& c) { c.lognormal_log_mean = 5.0; }) == "lognormal");
  CHECK(invalid([](RunConfig& c) { c.transport.timeout_s = 0; }) == "transport.timeout_s");
  CHECK_THROWS_AS(load_run_config("/nonexistent/nvlab.json"), ConfigError);
  try {
    run_config_from_json(nlohmann::json{{"rounds", 0}}).validate();
  } catch (const ConfigError& e) {
    CHECK(e.exit_code() == ExitCode::kConfig);
  }
}

TEST_CASE("agent short forms") {
  CHECK(parse_agent("optimal").kind == AgentKind::kOptimal);
  CHECK(parse_agent("random").seed == 0);
  CHECK(parse_agent("random:17").seed == 17);
  CHECK(parse_agent("mean-anchor:0.4").anchor_weight == 0.4);
  const auto chaser = parse_agent("demand-chaser:0.5");
  CHECK(chaser.chase_rate == 0.5);
  CHECK(chaser.switch_round == 0);
  const auto sw = parse_agent("demand-chaser:0->1@8");
  CHECK(sw.chase_rate_early == 0.0);
  CHECK(sw.chase_rate == 1.0);
  CHECK(sw.switch_round == 8);
  const auto fx = parse_agent("fixture:182.42/175.25");
  CHECK(fx.fixture_mean_high == 182.42);
  CHECK(fx.fixture_mean_low == 175.25);
  const auto llm = parse_agent("llm:gpt-4o", 0.3, 4);
  CHECK(llm.model_name == "gpt-4o");
  CHECK(llm.temperature == 0.3);
  CHECK(llm.parse_policy.max_retries == 4);
  for (const char* bad : {"oracle", "optimal:3", "mean-anchor", "fixture:1", "llm", "demand-chaser:1->2",
                          "mean-anchor:abc"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_agent(bad), ConfigError);
  }
  RunConfig c;
  CHECK_FALSE(has_llm_agent(c));
  c.agents.push_back("llm:x");
  CHECK(has_llm_agent(c));
}

TEST_CASE("the default grid expands to the full condition set") {
  RunConfig c;
  c.agents = {"optimal", "random:1"};
  const auto plans = build_plans(c, "digest");
  REQUIRE(plans.size() == 2);
  // 3 experiments x 3 distributions x 2 orders, minus the risk-neutral lognormal.
  CHECK(plans[0].conditions.size() == 16);
  CHECK(plans[0].total_blocks() == 16 * 10 * 2);
  CHECK(plans[0].total_rounds() == 16 * 10 * 2 * 15);
  CHECK(plans[0].template_digest == "digest");
  CHECK(plans[0].run_id == default_run_id(plans[0]));
  CHECK(plans[0].run_id != plans[1].run_id);
  for (const auto& cond : plans[0].conditions) {
    CHECK(cond.base_seed == 42);
    CHECK(cond.high.margin == Margin::kHigh);
    CHECK(cond.low.costs.cost == 9.0);
    CHECK_FALSE((cond.high.experiment == Experiment::kRiskNeutral &&
                 cond.high.demand.kind() == DemandKind::kLognormal));
  }
  c.risk_neutral_lognormal = true;
  CHECK(build_plans(c, "d")[0].conditions.size() == 18);
  const auto& ln = build_plans(c, "d")[0].conditions.back();
  CHECK(ln.high.demand.lower() == 901);
  CHECK(ln.high.demand.kind() == DemandKind::kLognormal);
}

TEST_CASE("the synthetic grid covers 3600 rounds per agent") {
  RunConfig c;
  c.distributions = {"uniform", "normal"};
  const auto plan = build_plans(c, "d").front();
  CHECK(plan.total_rounds() == 3600);
}

TEST_CASE("run names") {
  RunConfig c;
  c.run_name = "pilot";
  CHECK(build_plans(c, "d")[0].run_id == "pilot");
  c.agents = {"optimal", "mean-anchor:0.5"};
  const auto plans = build_plans(c, "d");
  CHECK(plans[0].run_id == "pilot-optimal");
  CHECK(plans[1].run_id.rfind("pilot-mean-anchor", 0) == 0);
  for (const auto& p : plans) {
    for (char ch : p.run_id) CHECK((std::isalnum((unsigned char)ch) || ch == '-' || ch == '_' || ch == '.'));
  }
}

TEST_CASE("custom lognormal parameters reach the scenarios") {
  RunConfig c;
  c.distributions = {"lognormal"};
  c.experiments = {"E1"};
  c.lognormal_log_mean = 5.0;
  c.lognormal_log_sd = 0.25;
  const auto plan = build_plans(c, "d").front();
  CHECK(plan.conditions.front().high.demand.location() == 5.0);
  CHECK(plan.conditions.front().low.demand.scale() == 0.25);
}

TEST_CASE("plans serialize and hash stably") {
  RunConfig c;
  c.agents = {"llm:gpt-4o"};
  c.experiments = {"E1"};
  const auto plan = build_plans(c, "d").front();
  const auto again = plan_from_json(nlohmann::json(plan));
  CHECK(plan_hash(again) == plan_hash(plan));
  CHECK(nlohmann::json(again) == nlohmann::json(plan));
  auto changed = plan;
  changed.conditions[0].agent.temperature = 0.5;
  CHECK(plan_hash(changed) != plan_hash(plan));
}

TEST_CASE("plan validation") {
  RunConfig c;
  auto plan = build_plans(c, "d").front();
  CHECK_NOTHROW(plan.validate());
  plan.run_id = "../escape";
  CHECK_THROWS(plan.validate());
  plan = build_plans(c, "d").front();
  plan.conditions[0].repetitions = 0;
  CHECK_THROWS(plan.validate());
  plan = build_plans(c, "d").front();
  std::swap(plan.conditions[0].high, plan.conditions[0].low);
  CHECK_THROWS(plan.validate());
}

}
