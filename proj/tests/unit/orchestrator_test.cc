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

#include "sockaudit/orchestrator.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace sockaudit {
namespace {

TEST(SelectPathsTest, KeepsOuterColumns) {
  StreamRng rng(1);
  for (int i = 0; i < 50; ++i) {
    const PathSchedule s = SelectPaths(40, 5, 1.0, rng);
    ASSERT_EQ(s.columns.size(), 5u);
    EXPECT_EQ(s.columns.front(), 0);
    EXPECT_EQ(s.columns.back(), 39);
    EXPECT_TRUE(std::is_sorted(s.columns.begin(), s.columns.end()));
    EXPECT_EQ(std::adjacent_find(s.columns.begin(), s.columns.end()),
              s.columns.end());
  }
  EXPECT_EQ(SelectPaths(40, 2, 1.0, rng).columns, (std::vector<int>{0, 39}));
  EXPECT_EQ(SelectPaths(7, 2, 1.0, rng).columns, (std::vector<int>{0, 6}));
}

TEST(SelectPathsTest, RejectsImpossibleShapes) {
  StreamRng rng(1);
  EXPECT_THROW(SelectPaths(40, 1, 1.0, rng), ValidationError);
  EXPECT_THROW(SelectPaths(4, 5, 1.0, rng), ValidationError);
}

TEST(DrawZipfColumnTest, FrequenciesFollowPowerLaw) {
  StreamRng rng(2);
  constexpr int kDraws = 200000;
  std::map<int, int> counts;
  for (int i = 0; i < kDraws; ++i) ++counts[DrawZipfColumn(40, 1.0, {}, rng)];
  double norm = 0.0;
  for (int c = 1; c <= 38; ++c) norm += 1.0 / (c + 1);
  for (int c : {1, 2, 5, 20, 38}) {
    const double expected = 1.0 / (c + 1) / norm;
    EXPECT_NEAR(counts[c] / static_cast<double>(kDraws), expected, 0.005) << c;
  }
  EXPECT_EQ(counts.count(0), 0u);
  EXPECT_EQ(counts.count(39), 0u);
  const std::vector<int> taken{1};
  for (int i = 0; i < 1000; ++i) EXPECT_NE(DrawZipfColumn(40, 1.0, taken, rng), 1);
}

TEST(WatchSecondsTest, RoundsUp) {
  EXPECT_EQ(WatchSeconds(1.0, 600), 600);
  EXPECT_EQ(WatchSeconds(0.1, 600), 60);
  EXPECT_EQ(WatchSeconds(0.5, 61), 31);
}

class OrchestratorTest : public ::testing::Test {
 protected:
  OrchestratorTest() {
    spec.world.catalog_size = 500;
    spec.world.n_channels = 30;
    spec.world.seed = 3;
    world = spec.world.Generate();
    for (int i = 0; i < 32; ++i) {
      spec.config_a.training_set.push_back(world.catalog()[i].video_id);
    }
    spec.config_b.training_set = spec.config_a.training_set;
    spec.config_a.seed_video = spec.config_b.seed_video = "v00100";
    spec.config_b.watch_fraction = 0.1;
    spec.n_trees_per_group = 3;
    spec.rng_seed = 17;
  }

  ExperimentSpec spec;
  SimWorld world = SimWorld::Generate(BiasParams{}, 1, 400, 10);
};

TEST_F(OrchestratorTest, TrainingRecordsEveryVideo) {
  PuppetSession s(AccountMode::kFull, 1, "p");
  TrainPuppet(world, s, spec.config_a.training_set, 1.0);
  EXPECT_EQ(s.history().size(), 32u);
  EXPECT_EQ(s.influence_count(), 32u);
}

TEST_F(OrchestratorTest, TraverseObservesEveryDepth) {
  PuppetSession s(AccountMode::kFull, 1, "p");
  TraverseOptions o;
  o.column = 7;
  const PathRecord r = TraversePath(world, s, "v00100", o);
  ASSERT_EQ(r.observations.size(), 11u);
  EXPECT_FALSE(r.failure.has_value());
  EXPECT_EQ(r.observations[0].watched, "v00100");
  for (std::size_t d = 1; d < r.observations.size(); ++d) {
    EXPECT_EQ(r.observations[d].watched,
              r.observations[d - 1].recommendations[7].video_id);
    EXPECT_EQ(r.observations[d].recommendations.size(), 40u);
  }
  EXPECT_EQ(s.history().size(), 11u);

  PuppetSession s0(AccountMode::kFull, 1, "p");
  o.depth = 0;
  const PathRecord root = TraversePath(world, s0, "v00100", o);
  ASSERT_EQ(root.observations.size(), 1u);
  EXPECT_EQ(root.observations[0].watched, "v00100");
}

TEST_F(OrchestratorTest, ShortListClampsTheNextStep) {
  const std::vector<Fault> faults{
      Fault{0, 0, 0, 2, FaultKind::kShortList, 3}};
  PuppetSession s(AccountMode::kFull, 1, "p");
  TraverseOptions o;
  o.column = 39;
  o.depth = 4;
  o.faults = faults;
  const PathRecord r = TraversePath(world, s, "v00100", o);
  ASSERT_EQ(r.observations.size(), 5u);
  EXPECT_EQ(r.observations[2].recommendations.size(), 3u);
  EXPECT_TRUE(r.observations[3].clamped);
  EXPECT_EQ(r.observations[3].watched,
            r.observations[2].recommendations[2].video_id);
  EXPECT_FALSE(r.observations[4].clamped);
}

TEST_F(OrchestratorTest, RunProducesFullTrees) {
  const ExperimentResult r = RunExperiment(spec, world, Scheduler::kSingleThreaded);
  ASSERT_EQ(r.trees_a.size(), 3u);
  ASSERT_EQ(r.trees_b.size(), 3u);
  ASSERT_EQ(r.schedules.size(), 3u);
  EXPECT_EQ(r.final_epoch, 11);
  for (const auto* group : {&r.trees_a, &r.trees_b}) {
    for (const auto& t : *group) {
      EXPECT_TRUE(t.complete());
      EXPECT_EQ(t.size(), 55u);
      EXPECT_EQ(t.seed(), "v00100");
      EXPECT_EQ(t.columns(), r.schedules[0].columns);
      for (const auto& [pos, node] : t.nodes()) EXPECT_EQ(node.epoch, pos.depth);
    }
  }
  EXPECT_EQ(r.trees_a[0].config_tag(), "a");
  EXPECT_EQ(r.trees_b[0].config_tag(), "b");
}

TEST_F(OrchestratorTest, SchedulersAgreeAndRunsRepeat) {
  const ExperimentResult threaded = RunExperiment(spec, world, Scheduler::kThreaded);
  const ExperimentResult single = RunExperiment(spec, world, Scheduler::kSingleThreaded);
  EXPECT_EQ(threaded.trees_a, single.trees_a);
  EXPECT_EQ(threaded.trees_b, single.trees_b);
  EXPECT_EQ(threaded.final_epoch, single.final_epoch);
  EXPECT_EQ(RunExperiment(spec, world).trees_a, threaded.trees_a);
}

TEST_F(OrchestratorTest, PerTreeSchedules) {
  spec.resample_paths_per_tree = true;
  spec.n_trees_per_group = 6;
  const ExperimentResult r = RunExperiment(spec, world, Scheduler::kSingleThreaded);
  bool varied = false;
  for (std::size_t t = 0; t < r.schedules.size(); ++t) {
    EXPECT_EQ(r.trees_a[t].columns(), r.schedules[t].columns);
    EXPECT_EQ(r.trees_b[t].columns(), r.schedules[t].columns);
    varied |= r.schedules[t] != r.schedules[0];
  }
  EXPECT_TRUE(varied);
}

TEST_F(OrchestratorTest, CrawlFailureLeavesGaps) {
  spec.faults.push_back(Fault{1, 2, 3, 6, FaultKind::kCrawlFailure, 1});
  const ExperimentResult r = RunExperiment(spec, world, Scheduler::kSingleThreaded);
  EXPECT_TRUE(r.trees_a[2].complete());
  const RecommendationTree& t = r.trees_b[2];
  EXPECT_FALSE(t.complete());
  EXPECT_EQ(t.size(), 55u - 5u);
  EXPECT_EQ(t.gaps().size(), 5u);
  EXPECT_EQ(t.node_at(3, 6), nullptr);
  EXPECT_NE(t.node_at(3, 5), nullptr);
  EXPECT_NE(t.node_at(2, 6), nullptr);
}

TEST_F(OrchestratorTest, ValidatesSpec) {
  spec.config_b.depth = 5;
  EXPECT_THROW(RunExperiment(spec, world), ValidationError);
  spec.config_b.depth = 10;
  spec.config_a.seed_video = "missing";
  EXPECT_THROW(RunExperiment(spec, world), ValidationError);
}

}  // namespace
}  // namespace sockaudit
