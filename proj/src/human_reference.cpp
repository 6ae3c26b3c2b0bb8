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
#include "nvlab/human_reference.hpp"

#include "json.hpp"
#include "nvlab/error.hpp"

namespace nvlab {
namespace embedded {
extern const std::string_view kHumanBenchmarks;
}

namespace {

HumanBenchmarks parse() {
  using nlohmann::json;
  const json j = json::parse(embedded::kHumanBenchmarks);
  HumanBenchmarks h;
  h.version = j.at("version").get<int>();
  h.source = j.at("source").get<std::string>();
  h.distribution = demand_kind_from_string(j.at("distribution").get<std::string>());
  h.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  h.mean_order_high = j.at("mean_orders").at("high").get<double>();
  h.mean_order_low = j.at("mean_orders").at("low").get<double>();
  for (const auto& [oc, v] : j.at("mas").items()) {
    h.mas[order_condition_from_string(oc)] = {v.at("high").get<double>(), v.at("low").get<double>()};
  }
  for (const auto& [oc, quarts] : j.at("adjustment_by_quartile").items()) {
    auto& dst = h.quartiles[order_condition_from_string(oc)];
    for (const auto& [q, v] : quarts.items()) {
      if (q.size() != 2 || q[0] != 'Q' || q[1] < '1' || q[1] > '4') {
        throw AssetError("human benchmarks: bad quartile label '" + q + "'");
      }
      dst[q[1] - '0'] = {v.at("no_change").get<double>(), v.at("toward").get<double>(),
                         v.at("away").get<double>()};
    }
  }
  return h;
}

}  // namespace

std::string_view human_benchmarks_json() { return embedded::kHumanBenchmarks; }

const HumanBenchmarks& human_benchmarks() {
  static const HumanBenchmarks h = parse();
  return h;
}

}  // namespace nvlab
