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
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nvlab/agents.hpp"
#include "nvlab/config.hpp"
#include "nvlab/error.hpp"
#include "nvlab/metrics.hpp"
#include "nvlab/newsvendor.hpp"
#include "nvlab/prompt.hpp"
#include "nvlab/report.hpp"
#include "nvlab/serialization.hpp"
#include "nvlab/session.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;

namespace {

nvlab::ScenarioConfig scenario(const std::string& experiment, const std::string& distribution,
                               const std::string& margin) {
  return nvlab::make_scenario(nvlab::experiment_from_string(experiment),
                              nvlab::demand_kind_from_string(distribution),
                              nvlab::margin_from_string(margin));
}

nvlab::PromptTemplateSet templates_from(const std::optional<fs::path>& dir) {
  return dir ? nvlab::PromptTemplateSet::load(*dir) : nvlab::PromptTemplateSet::load_default();
}

py::dict event_dict(const nvlab::AdjustmentEvent& e) {
  py::dict d;
  d["round"] = e.round_index;
  d["delta"] = e.delta;
  d["prior_error"] = e.prior_error;
  d["direction"] = std::string(nvlab::to_string(e.direction));
  d["magnitude"] = e.magnitude;
  d["quartile"] = e.quartile;
  return d;
}

std::vector<std::string> simulate(const py::dict& config, const fs::path& store_root, int workers) {
  const nlohmann::json j = nlohmann::json::parse(py::module_::import("json").attr("dumps")(config).cast<std::string>());
  nvlab::RunConfig rc = nvlab::run_config_from_json(j);
  rc.validate();
  if (nvlab::has_llm_agent(rc)) {
    throw nvlab::ConfigError("agents", "llm agents run through the nvlab command-line tool");
  }
  const auto templates = nvlab::PromptTemplateSet::load_default();
  nvlab::RunOptions opts;
  opts.store_root = store_root;
  opts.workers = workers;
  std::vector<std::string> ids;
  py::gil_scoped_release release;
  for (const auto& plan : nvlab::build_plans(rc, templates.digest())) {
    ids.push_back(nvlab::run_plan(plan, templates, opts).run_id);
  }
  return ids;
}

std::map<std::string, std::string> report(const std::vector<std::string>& run_ids, const fs::path& store_root,
                                          const std::optional<fs::path>& output_dir, bool compare_humans,
                                          bool mas_printed, bool pooled_slopes, bool include_incomplete) {
  const auto templates = nvlab::PromptTemplateSet::load_default();
  std::vector<nvlab::ReportInput> inputs;
  for (const auto& id : run_ids) inputs.push_back({id, nvlab::load_trajectories(store_root, id, templates)});
  nvlab::ReportOptions options;
  options.compare_humans = compare_humans;
  options.mas_orientation = mas_printed ? nvlab::MasOrientation::kPrinted : nvlab::MasOrientation::kAdjustment;
  options.pooled_slopes = pooled_slopes;
  options.include_incomplete = include_incomplete;
  const auto bundle = nvlab::build_report(inputs, options);
  if (output_dir) nvlab::write_report(bundle, *output_dir);
  return bundle.files;
}

}  // namespace

PYBIND11_MODULE(_nvlab, m) {
  m.doc() = "Newsvendor decision experiments: scenarios, simulation, metrics and reports.";

  auto base = py::register_exception<nvlab::Error>(m, "NvlabError", PyExc_RuntimeError);
  py::register_exception<nvlab::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<nvlab::InvalidScenarioError>(m, "InvalidScenarioError", base.ptr());
  py::register_exception<nvlab::AssetError>(m, "AssetError", base.ptr());
  py::register_exception<nvlab::TemplateError>(m, "TemplateError", base.ptr());
  py::register_exception<nvlab::IntegrityError>(m, "IntegrityError", base.ptr());
  py::register_exception<nvlab::AmbiguousDecisionError>(m, "AmbiguousDecisionError", base.ptr());
  py::register_exception<nvlab::TransportError>(m, "TransportError", base.ptr());

  m.def("profit",
        [](int order, int demand, double price, double cost) {
          return nvlab::profit(order, demand, nvlab::CostStructure{price, cost, 0});
        },
        py::arg("order"), py::arg("demand"), py::arg("price") = 12.0, py::arg("cost") = 3.0);
  m.def("optimal_quantity",
        [](const std::string& e, const std::string& d, const std::string& mg) {
          return nvlab::optimal_quantity(scenario(e, d, mg));
        },
        py::arg("experiment"), py::arg("distribution"), py::arg("margin"));
  m.def("expected_profit",
        [](double order, const std::string& e, const std::string& d, const std::string& mg) {
          return nvlab::expected_profit(order, scenario(e, d, mg));
        },
        py::arg("order"), py::arg("experiment"), py::arg("distribution"), py::arg("margin"));
  m.def("sample_demands",
        [](const std::string& e, const std::string& d, int rounds, std::uint64_t seed) {
          return nvlab::sample_sequence(scenario(e, d, "high").demand, rounds, seed).draws;
        },
        py::arg("experiment"), py::arg("distribution"), py::arg("rounds"), py::arg("seed"));
  m.def("derive_seed", &nvlab::derive_seed, py::arg("base_seed"), py::arg("repetition"), py::arg("block"));

  m.def("extract_order",
        [](const std::string& raw, int plausible_max) {
          nvlab::ParsePolicy policy;
          policy.plausible_max = plausible_max;
          const auto x = nvlab::extract_order(raw, policy);
          return py::make_tuple(x.order, std::string(nvlab::to_string(x.confidence)));
        },
        py::arg("raw"), py::arg("plausible_max") = 600);
  m.def("validate_prompts",
        [](std::optional<fs::path> templates, std::optional<fs::path> golden) {
          const auto mismatches = nvlab::validate_prompts(
              templates_from(templates), golden.value_or(nvlab::default_asset_dir() / "golden"));
          py::list out;
          for (const auto& g : mismatches) {
            py::dict d;
            d["name"] = g.name;
            d["line"] = g.line;
            d["expected"] = g.expected_line;
            d["actual"] = g.actual_line;
            out.append(d);
          }
          return out;
        },
        py::arg("templates") = py::none(), py::arg("golden") = py::none());
  m.def("prompt_hash", [](const std::string& s) { return nvlab::prompt_hash(s); });

  m.def("mas",
        [](double mean_order, double optimal, const std::string& e, const std::string& d,
           const std::string& mg, bool printed) {
          const auto sc = scenario(e, d, mg);
          const auto a = nvlab::mas(mean_order, sc.demand.mean(), optimal, sc.margin,
                                    printed ? nvlab::MasOrientation::kPrinted : nvlab::MasOrientation::kAdjustment);
          return a.undefined ? py::object(py::none()) : py::object(py::float_(a.mas));
        },
        py::arg("mean_order"), py::arg("optimal"), py::arg("experiment"), py::arg("distribution"),
        py::arg("margin"), py::arg("printed") = false);
  m.def("profit_efficiency",
        [](double order, const std::string& e, const std::string& d, const std::string& mg) {
          const auto pe = nvlab::profit_efficiency(order, scenario(e, d, mg));
          return pe.undefined ? py::object(py::none()) : py::object(py::float_(pe.percent));
        },
        py::arg("order"), py::arg("experiment"), py::arg("distribution"), py::arg("margin"));
  m.def("classify_adjustments",
        [](const std::vector<int>& orders, const std::vector<int>& demands) {
          py::list out;
          for (const auto& e : nvlab::classify_adjustments(orders, demands)) out.append(event_dict(e));
          return out;
        },
        py::arg("orders"), py::arg("demands"));
  m.def("quartile_thresholds",
        [](std::vector<double> pool) { return nvlab::quartile_thresholds(std::move(pool)).cuts; });
  m.def("ols",
        [](const std::vector<double>& x, const std::vector<double>& y) {
          const auto f = nvlab::ols(x, y);
          py::dict d;
          d["intercept"] = f.intercept;
          d["slope"] = f.slope;
          d["r2"] = f.r2;
          d["n"] = f.n;
          d["degenerate"] = f.degenerate;
          return d;
        },
        py::arg("x"), py::arg("y"));

  m.def("simulate", &simulate, py::arg("config"), py::arg("store_root") = fs::path("runs"), py::arg("workers") = 1,
        "Run scripted agents from a config dict; returns the run ids. Existing runs with the same plan resume.");
  m.def("report", &report, py::arg("run_ids"), py::arg("store_root") = fs::path("runs"),
        py::arg("output_dir") = py::none(), py::arg("compare_humans") = false, py::arg("mas_printed") = false,
        py::arg("pooled_slopes") = false, py::arg("include_incomplete") = false);
}
