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

#include <fmt/format.h>

#include "doctest.h"
#include "nvlab/config.hpp"
#include "nvlab/error.hpp"
#include "nvlab/human_reference.hpp"
#include "nvlab/report.hpp"
#include "nvlab/session.hpp"
#include "reported_means.hpp"

using namespace nvlab;
namespace fs = std::filesystem;

namespace {

const PromptTemplateSet& templates() {
  static const PromptTemplateSet t =
      PromptTemplateSet::load(fs::path(NVLAB_SOURCE_DIR) / "assets" / "templates");
  return t;
}

fs::path fresh_root(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nvlab_report_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<ReportInput> simulate(const RunConfig& config, const fs::path& root) {
  RunOptions opts;
  opts.store_root = root;
  std::vector<ReportInput> inputs;
  for (const auto& plan : build_plans(config, templates().digest())) {
    run_plan(plan, templates(), opts);
    inputs.push_back({plan.run_id, load_trajectories(root, plan.run_id, templates())});
  }
  return inputs;
}

std::vector<std::map<std::string, std::string>> rows_where(
    const std::vector<std::map<std::string, std::string>>& rows, const std::map<std::string, std::string>& match) {
  std::vector<std::map<std::string, std::string>> out;
  for (const auto& r : rows) {
    bool ok = true;
    for (const auto& [k, v] : match) ok = ok && r.count(k) && r.at(k) == v;
    if (ok) out.push_back(r);
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("fixture replay reproduces the reported deviations") {
  RunConfig config;
  config.experiments = {"E1"};
  config.run_name = "fixtures";
  for (const auto& r : testing::reported_means()) {
    config.agents.push_back(fmt::format("fixture:{}/{}", r.mean_high, r.mean_low));
  }
  config.agents.erase(config.agents.begin());  // drop the default optimal agent
  const auto inputs = simulate(config, fresh_root("fixtures"));
  const auto bundle = build_report(inputs);
  const auto rows = parse_csv(bundle.files.at("table3_bias.csv"));
  for (const auto& r : testing::reported_means()) {
    const std::string agent = parse_agent(fmt::format("fixture:{}/{}", r.mean_high, r.mean_low)).label();
    for (const auto& [margin, dev] : {std::pair{"high", r.deviation_high}, std::pair{"low", r.deviation_low}}) {
      const auto hit = rows_where(rows, {{"agent", agent},
                                         {"margin", margin},
                                         {"distribution", std::string(to_string(r.kind))}});
      REQUIRE(hit.size() == 1);
      CAPTURE(r.model);
      CHECK(fmt::format("{:+.2f}", std::stod(hit[0].at("order_bias"))) == fmt::format("{:+.2f}", dev));
      CHECK(hit[0].at("orders") == "300");
    }
  }
}

TEST_CASE("human reference rows") {
  const auto& h = human_benchmarks();
  CHECK(h.mean_order_high == 176.83);
  CHECK(h.mean_order_low == 134.06);
  CHECK(h.mas.at(OrderCondition::kHighFirst).first == 0.36);
  CHECK(h.quartiles.at(OrderCondition::kLowFirst).at(1).no_change == 63.7);

  const auto bundle = build_report({}, ReportOptions{.compare_humans = true});
  const auto t3 = parse_csv(bundle.files.at("table3_bias.csv"));
  const auto humans = rows_where(t3, {{"agent", "Humans"}});
  REQUIRE(humans.size() == 2);
  CHECK(humans[0].at("order_bias") == "-48.1700");
  CHECK(humans[1].at("order_bias") == "59.0600");
  CHECK(humans[0].at("source") == h.source);
  const auto t4 = rows_where(parse_csv(bundle.files.at("table4_mas.csv")), {{"agent", "Humans"}});
  CHECK(t4.size() == 4);
  const auto t7 = rows_where(parse_csv(bundle.files.at("table7_quartiles.csv")), {{"agent", "Humans"}});
  CHECK(t7.size() == 4);
  CHECK(bundle.files.at("summary.md").find("Humans") != std::string::npos);

  const auto plain = build_report({});
  CHECK(rows_where(parse_csv(plain.files.at("table3_bias.csv")), {{"agent", "Humans"}}).empty());
}

TEST_CASE("synthetic grid report recovers the agent parameters") {
  RunConfig config;
  config.distributions = {"uniform", "normal"};
  config.agents = {"optimal", "mean-anchor:0.5", "demand-chaser:1"};
  config.run_name = "grid";
  const auto inputs = simulate(config, fresh_root("grid"));
  REQUIRE(inputs.size() == 3);
  for (const auto& in : inputs) CHECK(in.trajectories.size() == 3 * 2 * 2 * 10 * 2);
  const auto bundle = build_report(inputs);
  CHECK(bundle.excluded_incomplete == 0);

  const auto t3 = parse_csv(bundle.files.at("table3_bias.csv"));
  for (const auto& r : rows_where(t3, {{"agent", "optimal"}})) {
    CHECK(r.at("order_bias") == "0.0000");
    CHECK(r.at("pe_optimal_over_actual_pct") == "100.0000");
  }
  const auto t4 = parse_csv(bundle.files.at("table4_mas.csv"));
  for (const auto& r : rows_where(t4, {{"agent", "mean-anchor(w=0.5)"}})) {
    CHECK(std::abs(std::stod(r.at("mas")) - 0.5) <= 0.02);
  }
  const auto t5 = parse_csv(bundle.files.at("table5_risk_neutral.csv"));
  const auto opt5 = rows_where(t5, {{"agent", "optimal"}, {"distribution", "uniform"}, {"margin", "high"}});
  REQUIRE(opt5.size() == 1);
  CHECK(opt5[0].at("cell") == "1125.00 | 1125 (+0.00%)");
  const auto t7 = parse_csv(bundle.files.at("table7_quartiles.csv"));
  for (const auto& r : rows_where(t7, {{"agent", "optimal"}})) CHECK(r.at("no_change_pct") == "100.0000");
  for (const auto& r : rows_where(t7, {{"agent", "demand-chaser(alpha=1)"}, {"quartile", "Q4"}})) {
    CHECK(std::stod(r.at("toward_pct")) >= 99.0);
  }
  const auto t6 = parse_csv(bundle.files.at("table6a_learning_e1.csv"));
  for (const auto& r : rows_where(t6, {{"agent", "optimal"}})) {
    CHECK(r.at("convergence_slope") == "0.0000");
    CHECK(r.at("efficiency_slope") == "0.0000");
    CHECK(r.at("slope_mode") == "per-trajectory-mean");
  }
  CHECK(parse_csv(bundle.files.at("fig1_trajectories.csv")).size() == 3 * 3600);
  CHECK_FALSE(parse_csv(bundle.files.at("fig345_adjustment_by_round.csv")).empty());
  const auto words = parse_csv(bundle.files.at("fig2_word_frequencies.csv"));
  CHECK_FALSE(rows_where(words, {{"agent", "optimal"}, {"term", "optimal"}}).empty());

  const auto pooled = build_report(inputs, ReportOptions{.pooled_slopes = true});
  for (const auto& r : rows_where(parse_csv(pooled.files.at("table6a_learning_e1.csv")), {})) {
    CHECK(r.at("slope_mode") == "pooled");
  }
  const auto printed = build_report(inputs, ReportOptions{.mas_orientation = MasOrientation::kPrinted});
  for (const auto& r : rows_where(parse_csv(printed.files.at("table4_mas.csv")), {{"agent", "mean-anchor(w=0.5)"}})) {
    CHECK(std::abs(std::stod(r.at("mas")) - 2.0) <= 0.1);
    CHECK(r.at("orientation") == "printed");
  }
}

TEST_CASE("reports are deterministic and leave the store untouched") {
  RunConfig config;
  config.experiments = {"E1"};
  config.distributions = {"uniform"};
  config.agents = {"random:4"};
  config.repetitions = 3;
  config.run_name = "det";
  const auto root = fresh_root("det");
  const auto inputs = simulate(config, root);
  const std::string before = slurp(root / "det" / "rounds.jsonl");
  const auto mtime = fs::last_write_time(root / "det" / "rounds.jsonl");
  const auto a = build_report(inputs);
  const auto reloaded = load_trajectories(root, "det", templates());
  const auto b = build_report({{"det", reloaded}});
  CHECK(a.files == b.files);
  CHECK(slurp(root / "det" / "rounds.jsonl") == before);
  CHECK(fs::last_write_time(root / "det" / "rounds.jsonl") == mtime);

  const auto out = root / "report";
  write_report(a, out);
  for (const auto& [name, content] : a.files) CHECK(slurp(out / name) == content);
}

TEST_CASE("incomplete trajectories are excluded unless asked for") {
  RunConfig config;
  config.experiments = {"E1"};
  config.distributions = {"uniform"};
  config.order_conditions = {"high-first"};
  config.repetitions = 1;
  config.run_name = "partial";
  const auto root = fresh_root("partial");
  const auto plan = build_plans(config, templates().digest()).front();
  RunOptions opts;
  opts.store_root = root;
  opts.max_new_rounds = 20;
  run_plan(plan, templates(), opts);
  const auto ts = load_trajectories(root, "partial", templates());
  const auto strict = build_report({{"partial", ts}});
  CHECK(strict.excluded_incomplete == 1);
  CHECK(parse_csv(strict.files.at("fig1_trajectories.csv")).size() == 15);
  const auto loose = build_report({{"partial", ts}}, ReportOptions{.include_incomplete = true});
  CHECK(loose.excluded_incomplete == 0);
  CHECK(parse_csv(loose.files.at("fig1_trajectories.csv")).size() == 20);
}

TEST_CASE("runs disagreeing on a cell's scenario are rejected") {
  RunConfig a;
  a.experiments = {"E1"};
  a.distributions = {"lognormal"};
  a.order_conditions = {"high-first"};
  a.repetitions = 1;
  a.run_name = "ln-default";
  RunConfig b = a;
  b.run_name = "ln-custom";
  b.lognormal_log_mean = 5.0;
  b.lognormal_log_sd = 0.2;
  const auto root = fresh_root("mixed");
  auto inputs = simulate(a, root);
  const auto more = simulate(b, root);
  inputs.insert(inputs.end(), more.begin(), more.end());
  CHECK_THROWS_AS(build_report(inputs), Error);
}

TEST_CASE("parse_csv handles quoting") {
  const auto rows = parse_csv("a,b\n\"x, y\",\"say \"\"hi\"\"\"\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("a") == "x, y");
  CHECK(rows[0].at("b") == "say \"hi\"");
}

}
