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

// Human benchmark values shipped as a read-only data asset and compiled into
// the library. Only the uniform baseline experiment has human data.

#include <map>
#include <string>
#include <string_view>

#include "nvlab/records.hpp"

namespace nvlab {

struct HumanShares {
  double no_change = 0.0;
  double toward = 0.0;
  double away = 0.0;
};

struct HumanBenchmarks {
  int version = 0;
  std::string source;
  DemandKind distribution = DemandKind::kUniform;
  Experiment experiment = Experiment::kBaseline;
  double mean_order_high = 0.0;
  double mean_order_low = 0.0;
  // (high-margin MAS, low-margin MAS) per presentation order.
  std::map<OrderCondition, std::pair<double, double>> mas;
  // Quartile (1..4) shares per presentation order; only Q1 and Q4 are known.
  std::map<OrderCondition, std::map<int, HumanShares>> quartiles;
};

std::string_view human_benchmarks_json();
const HumanBenchmarks& human_benchmarks();

}  // namespace nvlab
