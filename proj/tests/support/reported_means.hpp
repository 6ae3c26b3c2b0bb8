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

// Mean orders and deviations of the baseline experiment, per model and
// distribution, used to drive fixture agents.

#include <string>
#include <vector>

#include "nvlab/newsvendor.hpp"

namespace nvlab::testing {

struct ReportedMeans {
  std::string model;
  DemandKind kind;
  double mean_high;
  double deviation_high;
  double mean_low;
  double deviation_low;
};

inline const std::vector<ReportedMeans>& reported_means() {
  static const std::vector<ReportedMeans> rows = {
      {"GPT-4", DemandKind::kUniform, 182.42, -42.58, 175.25, 100.25},
      {"GPT-4o", DemandKind::kUniform, 176.03, -48.97, 168.89, 93.89},
      {"LLaMA-8B", DemandKind::kUniform, 147.72, -77.28, 158.45, 83.45},
      {"GPT-4", DemandKind::kTruncatedNormal, 181.07, -2.93, 175.58, 58.58},
      {"GPT-4o", DemandKind::kTruncatedNormal, 169.55, -14.45, 157.88, 40.88},
      {"LLaMA-8B", DemandKind::kTruncatedNormal, 154.38, -29.62, 153.61, 36.61},
      {"GPT-4", DemandKind::kLognormal, 168.08, 3.08, 163.50, 28.50},
      {"GPT-4o", DemandKind::kLognormal, 165.58, 0.58, 138.88, 3.88},
      {"LLaMA-8B", DemandKind::kLognormal, 144.87, -20.13, 146.55, 11.55},
  };
  return rows;
}

}  // namespace nvlab::testing
