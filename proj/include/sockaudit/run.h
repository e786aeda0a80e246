// Copyright 2026 The sockaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOCKAUDIT_RUN_H_
#define SOCKAUDIT_RUN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sockaudit/orchestrator.h"
#include "sockaudit/tree.h"

namespace sockaudit {

inline constexpr int kManifestSchemaVersion = 1;

struct ManifestEntry {
  std::string file;  // relative to the run directory
  int group = 0;
  int index = 0;
  std::string config_tag;
  bool complete = true;
  std::size_t nodes = 0;
  std::size_t gaps = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct RunManifest {
  std::string spec_hash;
  // UTC, ISO 8601. Taken from SOURCE_DATE_EPOCH when that is set.
  std::string created_at;
  std::uint64_t rng_seed = 0;
  std::uint64_t world_seed = 0;
  std::int64_t final_epoch = 0;
  std::vector<ManifestEntry> trees;

  std::size_t partial_count() const;
};

nlohmann::json ManifestToJson(const RunManifest& manifest);
RunManifest ManifestFromJson(const nlohmann::json& doc);

// Runs the experiment and writes spec.json, trees/{a,b}_NN.json and
// manifest.json under out_dir. Tree files are a pure function of the spec.
RunManifest Run(const ExperimentSpec& spec, const std::filesystem::path& out_dir,
                Scheduler scheduler = Scheduler::kThreaded);

struct LoadedRun {
  ExperimentSpec spec;
  RunManifest manifest;
  std::vector<RecommendationTree> trees_a;
  std::vector<RecommendationTree> trees_b;
};

// Reads a run directory back and checks it: every listed file exists and
// parses, the stored spec hashes to manifest.spec_hash, and each tree's
// completeness matches its manifest status. Throws ValidationError.
LoadedRun LoadRun(const std::filesystem::path& run_dir);

}  // namespace sockaudit

#endif  // SOCKAUDIT_RUN_H_
