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

#ifndef SOCKAUDIT_ORCHESTRATOR_H_
#define SOCKAUDIT_ORCHESTRATOR_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sockaudit/common.h"
#include "sockaudit/rng.h"
#include "sockaudit/sim.h"
#include "sockaudit/tree.h"

namespace sockaudit {

// One audit configuration: how a group of sock-puppets is trained, seeded
// and walked.
struct AuditConfig {
  std::string label;
  std::vector<std::string> training_set;
  std::string seed_video;
  AccountMode account_mode = AccountMode::kFull;
  double watch_fraction = 1.0;
  InteractionMode interaction = InteractionMode::kClick;
  int n_paths = 5;
  int depth = 10;
  int n_rec = kDefaultRecommendations;
  double zipf_s = 1.0;

  // Throws ValidationError naming the offending field.
  void Validate() const;
  friend bool operator==(const AuditConfig&, const AuditConfig&) = default;
};

// Column followed at every depth, one entry per path. Always starts with
// column 0 (leftmost) and ends with column n_rec - 1 (rightmost).
struct PathSchedule {
  std::vector<int> columns;

  friend bool operator==(const PathSchedule&, const PathSchedule&) = default;
};

// Middle columns are drawn without replacement from [1, n_rec - 2] with
// weight (column + 1)^-zipf_s, then sorted. Throws ValidationError when
// n_paths < 2 or there are too few middle columns.
PathSchedule SelectPaths(int n_rec, int n_paths, double zipf_s,
                         StreamRng& rng);

// One weighted draw from the middle columns, excluding `taken`.
int DrawZipfColumn(int n_rec, double zipf_s, std::span<const int> taken,
                   StreamRng& rng);

// ceil(fraction * duration).
std::int64_t WatchSeconds(double fraction, std::int64_t duration_s);

// Watches every training video in order. Simulated time only.
void TrainPuppet(const SimWorld& world, PuppetSession& session,
                 std::span<const std::string> training_set,
                 double watch_fraction);

enum class FaultKind {
  // The crawler dies before observing `depth`.
  kCrawlFailure,
  // The platform returns an empty list at `depth`.
  kEmptyList,
  // The platform returns only `list_length` recommendations at `depth`.
  kShortList,
};

struct Fault {
  int group = 0;  // 0 = config_a, 1 = config_b
  int tree = 0;
  int path = 0;
  int depth = 0;
  FaultKind kind = FaultKind::kCrawlFailure;
  int list_length = 1;

  friend bool operator==(const Fault&, const Fault&) = default;
};

struct TraverseOptions {
  int column = 0;
  int depth = 10;
  int n_rec = kDefaultRecommendations;
  double watch_fraction = 1.0;
  InteractionMode interaction = InteractionMode::kClick;
  std::span<const Fault> faults;  // already filtered to this crawler
};

// A single sock-puppet walking one path, one depth per Step(). The
// orchestrator steps many of these in lockstep.
class PathCrawler {
 public:
  PathCrawler(const SimWorld& world, PuppetSession session, std::string seed,
              TraverseOptions options);

  // Observes depth `depth` (0 = seed). No-op once the crawl has failed.
  void Step(int depth, std::int64_t epoch);

  bool failed() const { return record_.failure.has_value(); }
  const PathRecord& record() const { return record_; }
  PathRecord TakeRecord() { return std::move(record_); }
  const PuppetSession& session() const { return session_; }

 private:
  const Fault* FaultAt(int depth) const;

  const SimWorld* world_;
  PuppetSession session_;
  std::string seed_;
  TraverseOptions options_;
  std::vector<Fault> faults_;
  std::string current_;
  std::vector<VideoMeta> last_recommendations_;
  PathRecord record_;
};

// Walks one path alone: watch the seed, record its recommendations, then
// follow `column` (clamped to the list) for `depth` steps.
PathRecord TraversePath(const SimWorld& world, PuppetSession& session,
                        std::string_view seed, const TraverseOptions& options);

// Where a world comes from when an experiment generates its own.
struct WorldSpec {
  BiasParams bias;
  WorldOptions options;
  std::uint64_t seed = 1;
  std::size_t catalog_size = 2000;
  std::size_t n_channels = 150;

  SimWorld Generate() const;
  friend bool operator==(const WorldSpec&, const WorldSpec&) = default;
};

struct ExperimentSpec {
  std::string name;
  AuditConfig config_a;
  AuditConfig config_b;
  int n_trees_per_group = 8;
  WorldSpec world;
  std::uint64_t rng_seed = 0;
  std::size_t resamples = 1'000'000;
  // Re-draw the middle columns for every tree index (shared by both
  // groups) instead of once per experiment.
  bool resample_paths_per_tree = false;
  std::vector<Fault> faults;

  void Validate() const;
  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

enum class Scheduler {
  // One thread per crawler, depth-indexed barrier.
  kThreaded,
  // Round-robin stepping on the calling thread.
  kSingleThreaded,
};

struct ExperimentResult {
  std::vector<RecommendationTree> trees_a;
  std::vector<RecommendationTree> trees_b;
  std::vector<PathSchedule> schedules;  // per tree index
  std::int64_t final_epoch = 0;
};

// Trains one puppet per (group, tree, path), then steps all of them
// through depth 0..D with a barrier after every depth. The world epoch is
// advanced only by the barrier, so paired crawlers observe the same epoch
// at the same node position.
ExperimentResult RunExperiment(const ExperimentSpec& spec, const SimWorld& world,
                               Scheduler scheduler = Scheduler::kThreaded);
ExperimentResult RunExperiment(const ExperimentSpec& spec,
                               Scheduler scheduler = Scheduler::kThreaded);

// Stable label used as the puppet id prefix and tree config tag.
std::string GroupTag(const ExperimentSpec& spec, int group);

}  // namespace sockaudit

#endif  // SOCKAUDIT_ORCHESTRATOR_H_
