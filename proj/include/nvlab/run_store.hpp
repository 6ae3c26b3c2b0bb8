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

// Append-only run store. Each run lives in <root>/<run_id>/ with
//   manifest.json  the plan, its hash and the template digest
//   rounds.jsonl   one line per resolved round or round error
//   requests.jsonl HTTP request log (llm runs only)

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "nvlab/records.hpp"

namespace nvlab {

struct RunManifest {
  ExperimentPlan plan;
  std::string plan_hash;
  std::string template_digest;
};

struct StoredRound {
  TrajectoryKey key;
  RoundRecord record;
  int line = 0;  // 1-based line in rounds.jsonl
};

struct StoredError {
  TrajectoryKey key;
  int round_index = 0;
  std::string kind;  // "transport" | "ambiguous" | "other"
  std::string message;
  std::string raw_response;
  int line = 0;
};

struct StoreContents {
  std::vector<StoredRound> rounds;
  std::vector<StoredError> errors;
};

class RunStore {
 public:
  // Creates <root>/<run_id>/ and writes the manifest. Fails if it exists.
  static std::unique_ptr<RunStore> create(const std::filesystem::path& root, const RunManifest& manifest);
  // Opens an existing run; throws IntegrityError on a bad manifest.
  static std::unique_ptr<RunStore> open(const std::filesystem::path& root, const std::string& run_id);
  static bool exists(const std::filesystem::path& root, const std::string& run_id);

  const RunManifest& manifest() const { return manifest_; }
  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path rounds_path() const { return dir_ / "rounds.jsonl"; }
  std::filesystem::path requests_path() const { return dir_ / "requests.jsonl"; }

  // Thread safe; each call writes and flushes one complete line. The file is
  // opened on the first append, so read-only users never touch it.
  void append_round(const TrajectoryKey& key, const PlanCondition& condition, const RoundRecord& record);
  void append_error(const StoredError& error);

  // Parses rounds.jsonl. Throws IntegrityError naming the first bad line.
  StoreContents read() const;

 private:
  RunStore(std::filesystem::path dir, RunManifest manifest);
  void write_line(const std::string& line);

  std::filesystem::path dir_;
  RunManifest manifest_;
  std::mutex mutex_;
  std::ofstream out_;
};

}  // namespace nvlab
