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
#include "nvlab/run_store.hpp"

#include <sstream>

#include "nvlab/error.hpp"
#include "nvlab/serialization.hpp"

namespace nvlab {
namespace fs = std::filesystem;

namespace {

json manifest_json(const RunManifest& m) {
  return json{{"format", "nvlab-run/1"},
              {"plan", m.plan},
              {"plan_hash", m.plan_hash},
              {"template_digest", m.template_digest}};
}

TrajectoryKey key_from(const json& j) {
  TrajectoryKey key;
  key.condition = j.at("condition").get<int>();
  key.repetition = j.at("repetition").get<int>();
  key.block_index = j.at("block").get<int>();
  return key;
}

}  // namespace

RunStore::RunStore(fs::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

bool RunStore::exists(const fs::path& root, const std::string& run_id) {
  return fs::exists(root / run_id / "manifest.json");
}

std::unique_ptr<RunStore> RunStore::create(const fs::path& root, const RunManifest& manifest) {
  const fs::path dir = root / manifest.plan.run_id;
  if (fs::exists(dir / "manifest.json")) {
    throw IntegrityError("run store " + dir.string() + " already exists");
  }
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest_json(manifest).dump(2) << '\n';
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  }
  return std::unique_ptr<RunStore>(new RunStore(dir, manifest));
}

std::unique_ptr<RunStore> RunStore::open(const fs::path& root, const std::string& run_id) {
  const fs::path dir = root / run_id;
  const fs::path path = dir / "manifest.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("run '" + run_id + "' has no manifest at " + path.string());
  RunManifest m;
  try {
    const json j = json::parse(in);
    m.plan = plan_from_json(j.at("plan"));
    m.plan_hash = j.at("plan_hash").get<std::string>();
    m.template_digest = j.at("template_digest").get<std::string>();
  } catch (const json::exception& e) {
    throw IntegrityError(path.string() + ": malformed manifest: " + e.what());
  }
  if (plan_hash(m.plan) != m.plan_hash) {
    throw IntegrityError(path.string() + ": plan_hash does not match the stored plan");
  }
  return std::unique_ptr<RunStore>(new RunStore(dir, std::move(m)));
}

void RunStore::write_line(const std::string& line) {
  std::lock_guard lock(mutex_);
  if (!out_.is_open()) {
    out_.open(rounds_path(), std::ios::app | std::ios::binary);
    if (!out_) throw Error("cannot open " + rounds_path().string() + " for append");
  }
  out_ << line << '\n';
  out_.flush();
  if (!out_) throw Error("write to " + rounds_path().string() + " failed");
}

void RunStore::append_round(const TrajectoryKey& key, const PlanCondition& condition,
                            const RoundRecord& record) {
  const auto& sc = condition.block_scenario(key.block_index);
  json j{{"type", "round"},
         {"run_id", manifest_.plan.run_id},
         {"trajectory", key.id()},
         {"condition", key.condition},
         {"repetition", key.repetition},
         {"block", key.block_index},
         {"order_condition", to_string(condition.order_condition)},
         {"experiment", to_string(sc.experiment)},
         {"distribution", to_string(sc.demand.kind())},
         {"margin", to_string(sc.margin)}};
  j.update(json(record));
  write_line(j.dump());
}

void RunStore::append_error(const StoredError& e) {
  json j{{"type", "round_error"},
         {"run_id", manifest_.plan.run_id},
         {"trajectory", e.key.id()},
         {"condition", e.key.condition},
         {"repetition", e.key.repetition},
         {"block", e.key.block_index},
         {"round", e.round_index},
         {"error_kind", e.kind},
         {"message", e.message},
         {"raw_response", e.raw_response}};
  write_line(j.dump());
}

StoreContents RunStore::read() const {
  StoreContents contents;
  std::ifstream in(rounds_path(), std::ios::binary);
  if (!in) return contents;
  std::string text;
  int line_no = 0;
  const std::string where = rounds_path().filename().string();
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    try {
      const json j = json::parse(text);
      if (j.at("run_id").get<std::string>() != manifest_.plan.run_id) {
        throw IntegrityError(where + " line " + std::to_string(line_no) + ": foreign run_id");
      }
      const auto type = j.at("type").get<std::string>();
      if (type == "round") {
        StoredRound r;
        r.key = key_from(j);
        r.record = j.get<RoundRecord>();
        r.line = line_no;
        if (j.at("trajectory").get<std::string>() != r.key.id()) {
          throw IntegrityError(where + " line " + std::to_string(line_no) +
                               ": trajectory id disagrees with its fields");
        }
        contents.rounds.push_back(std::move(r));
      } else if (type == "round_error") {
        StoredError e;
        e.key = key_from(j);
        e.round_index = j.at("round").get<int>();
        e.kind = j.value("error_kind", "");
        e.message = j.value("message", "");
        e.raw_response = j.value("raw_response", "");
        e.line = line_no;
        contents.errors.push_back(std::move(e));
      } else {
        throw IntegrityError(where + " line " + std::to_string(line_no) + ": unknown record type '" +
                             type + "'");
      }
    } catch (const json::exception& e) {
      throw IntegrityError(where + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return contents;
}

}  // namespace nvlab
