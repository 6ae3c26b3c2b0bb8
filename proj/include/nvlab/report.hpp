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

// Summary tables and figure data computed from stored runs.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nvlab/metrics.hpp"
#include "nvlab/records.hpp"

namespace nvlab {

struct ReportOptions {
  MasOrientation mas_orientation = MasOrientation::kAdjustment;
  bool pooled_slopes = false;
  bool compare_humans = false;
  bool include_incomplete = false;
  LearningOptions learning;
  std::vector<std::string> stopwords = default_stopwords();
};

struct ReportInput {
  std::string run_id;
  std::vector<Trajectory> trajectories;
};

// File name -> content. Names:
//   table3_bias.csv table4_mas.csv table5_risk_neutral.csv
//   table6a_learning_e1.csv table6b_learning_e2.csv table7_quartiles.csv
//   fig1_trajectories.csv fig345_adjustment_by_round.csv
//   fig2_word_frequencies.csv summary.md
struct ReportBundle {
  std::map<std::string, std::string> files;
  int excluded_incomplete = 0;
};

// Throws Error when runs disagree on the scenario of one table cell.
ReportBundle build_report(const std::vector<ReportInput>& runs, const ReportOptions& options = {});

void write_report(const ReportBundle& bundle, const std::filesystem::path& dir);

// Minimal CSV reader for the bundle's own files (no embedded newlines).
std::vector<std::map<std::string, std::string>> parse_csv(const std::string& text);

}  // namespace nvlab
