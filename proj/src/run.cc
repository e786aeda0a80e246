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

#include "sockaudit/run.h"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "sockaudit/config.h"

namespace sockaudit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string Timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string TreeFileName(int group, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trees/%c_%02d.json", group == 0 ? 'a' : 'b',
                index);
  return buf;
}

ManifestEntry EntryFor(const RecommendationTree& tree, int group, int index) {
  ManifestEntry e;
  e.file = TreeFileName(group, index);
  e.group = group;
  e.index = index;
  e.config_tag = tree.config_tag();
  e.complete = tree.complete();
  e.nodes = tree.size();
  e.gaps = tree.gaps().size();
  return e;
}

}  // namespace

std::size_t RunManifest::partial_count() const {
  std::size_t n = 0;
  for (const auto& e : trees) n += e.complete ? 0 : 1;
  return n;
}

json ManifestToJson(const RunManifest& m) {
  json trees = json::array();
  for (const auto& e : m.trees) {
    trees.push_back(json{{"file", e.file},
                         {"group", e.group == 0 ? "a" : "b"},
                         {"index", e.index},
                         {"config_tag", e.config_tag},
                         {"status", e.complete ? "complete" : "partial"},
                         {"nodes", e.nodes},
                         {"gaps", e.gaps}});
  }
  return json{{"schema_version", kManifestSchemaVersion},
              {"spec_hash", m.spec_hash},
              {"created_at", m.created_at},
              {"rng_seed", m.rng_seed},
              {"world_seed", m.world_seed},
              {"final_epoch", m.final_epoch},
              {"trees", std::move(trees)}};
}

RunManifest ManifestFromJson(const json& doc) {
  RunManifest m;
  try {
    if (doc.at("schema_version").get<int>() != kManifestSchemaVersion) {
      throw ValidationError("manifest: unsupported schema_version");
    }
    m.spec_hash = doc.at("spec_hash").get<std::string>();
    m.created_at = doc.at("created_at").get<std::string>();
    m.rng_seed = doc.at("rng_seed").get<std::uint64_t>();
    m.world_seed = doc.at("world_seed").get<std::uint64_t>();
    m.final_epoch = doc.at("final_epoch").get<std::int64_t>();
    for (const json& t : doc.at("trees")) {
      ManifestEntry e;
      e.file = t.at("file").get<std::string>();
      const auto group = t.at("group").get<std::string>();
      if (group != "a" && group != "b") {
        throw ValidationError("manifest: bad group '" + group + "'");
      }
      e.group = group == "a" ? 0 : 1;
      e.index = t.at("index").get<int>();
      e.config_tag = t.at("config_tag").get<std::string>();
      const auto status = t.at("status").get<std::string>();
      if (status != "complete" && status != "partial") {
        throw ValidationError("manifest: bad status '" + status + "'");
      }
      e.complete = status == "complete";
      e.nodes = t.at("nodes").get<std::size_t>();
      e.gaps = t.at("gaps").get<std::size_t>();
      m.trees.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

RunManifest Run(const ExperimentSpec& spec, const fs::path& out_dir,
                Scheduler scheduler) {
  spec.Validate();
  const SimWorld world = spec.world.Generate();
  ExperimentResult result = RunExperiment(spec, world, scheduler);

  fs::create_directories(out_dir / "trees");
  RunManifest m;
  m.spec_hash = SpecHash(spec);
  m.created_at = Timestamp();
  m.rng_seed = spec.rng_seed;
  m.world_seed = spec.world.seed;
  m.final_epoch = result.final_epoch;
  WriteFile(out_dir / "spec.json", SpecToJson(spec).dump(2) + "\n");
  for (int g = 0; g < 2; ++g) {
    const auto& trees = g == 0 ? result.trees_a : result.trees_b;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      ManifestEntry e = EntryFor(trees[i], g, static_cast<int>(i));
      WriteFile(out_dir / e.file, Serialize(trees[i]));
      m.trees.push_back(std::move(e));
    }
  }
  WriteFile(out_dir / "manifest.json", ManifestToJson(m).dump(2) + "\n");
  return m;
}

LoadedRun LoadRun(const fs::path& run_dir) {
  LoadedRun run;
  json manifest_doc;
  try {
    manifest_doc = json::parse(ReadFile(run_dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("manifest.json: ") + e.what());
  }
  run.manifest = ManifestFromJson(manifest_doc);
  run.spec = ParseSpec(ReadFile(run_dir / "spec.json"));
  if (SpecHash(run.spec) != run.manifest.spec_hash) {
    throw ValidationError("spec.json does not match manifest spec_hash");
  }
  for (const auto& e : run.manifest.trees) {
    const fs::path file = run_dir / e.file;
    RecommendationTree tree = [&] {
      try {
        return Deserialize(ReadFile(file));
      } catch (const ValidationError& err) {
        throw ValidationError(e.file + ": " + err.what());
      }
    }();
    if (tree.complete() != e.complete) {
      throw ValidationError(e.file + ": status does not match manifest");
    }
    auto& dest = e.group == 0 ? run.trees_a : run.trees_b;
    if (e.index != static_cast<int>(dest.size())) {
      throw ValidationError(e.file + ": tree index out of order in manifest");
    }
    dest.push_back(std::move(tree));
  }
  if (static_cast<int>(run.trees_a.size()) != run.spec.n_trees_per_group ||
      static_cast<int>(run.trees_b.size()) != run.spec.n_trees_per_group) {
    throw ValidationError("manifest tree count does not match the spec");
  }
  return run;
}

}  // namespace sockaudit
