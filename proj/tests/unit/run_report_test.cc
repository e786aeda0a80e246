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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sockaudit/config.h"
#include "sockaudit/report.h"
#include "sockaudit/run.h"
#include "support/random_trees.h"

namespace sockaudit {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentSpec SmallSpec() {
  const nlohmann::json doc{
      {"name", "small"},
      {"rng_seed", 4},
      {"n_trees_per_group", 4},
      {"resamples", 2000},
      {"world", {{"catalog_size", 500}, {"n_channels", 30}, {"seed", 9}}},
      {"defaults",
       {{"training_set", {{"select", "most_viewed"}, {"count", 8}}},
        {"seed_video", "v00050"},
        {"n_paths", 3},
        {"depth", 3}}},
      {"config_a", {{"label", "full"}}},
      {"config_b", {{"label", "partial"}, {"watch_fraction", 0.1}}},
  };
  return ParseSpec(doc.dump());
}

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::path(::testing::TempDir()) /
          ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  AnalyzeOptions Options() const {
    AnalyzeOptions o;
    o.bootstrap.n_resamples = 2000;
    o.bootstrap.seed = 1;
    return o;
  }

  fs::path dir;
  ExperimentSpec spec = SmallSpec();
};

TEST_F(RunTest, WritesManifestAndTrees) {
  const RunManifest m = sockaudit::Run(spec, dir / "run", Scheduler::kSingleThreaded);
  ASSERT_EQ(m.trees.size(), 8u);
  EXPECT_EQ(m.partial_count(), 0u);
  EXPECT_EQ(m.spec_hash, SpecHash(spec));
  EXPECT_EQ(m.trees[0].file, "trees/a_00.json");
  EXPECT_EQ(m.trees[7].file, "trees/b_03.json");
  for (const auto& e : m.trees) {
    EXPECT_TRUE(fs::exists(dir / "run" / e.file));
    EXPECT_EQ(e.nodes, 12u);
  }
  const LoadedRun loaded = LoadRun(dir / "run");
  EXPECT_EQ(loaded.spec, spec);
  EXPECT_EQ(loaded.trees_a.size(), 4u);
  EXPECT_EQ(ManifestFromJson(ManifestToJson(m)).trees, m.trees);
}

TEST_F(RunTest, RerunIsByteIdentical) {
  sockaudit::Run(spec, dir / "one", Scheduler::kSingleThreaded);
  sockaudit::Run(spec, dir / "two", Scheduler::kThreaded);
  for (const char* f : {"spec.json", "trees/a_00.json", "trees/b_03.json"}) {
    EXPECT_EQ(Slurp(dir / "one" / f), Slurp(dir / "two" / f)) << f;
  }
}

TEST_F(RunTest, LoadRejectsTampering) {
  sockaudit::Run(spec, dir / "run", Scheduler::kSingleThreaded);
  fs::remove(dir / "run" / "trees" / "b_01.json");
  EXPECT_THROW(LoadRun(dir / "run"), ValidationError);
  EXPECT_THROW(LoadRun(dir / "missing"), ValidationError);
}

TEST_F(RunTest, PartialTreesAreExcluded) {
  spec.faults.push_back(Fault{0, 1, 2, 2, FaultKind::kCrawlFailure, 1});
  const RunManifest m = sockaudit::Run(spec, dir / "run", Scheduler::kSingleThreaded);
  EXPECT_EQ(m.partial_count(), 1u);
  EXPECT_FALSE(m.trees[1].complete);
  EXPECT_EQ(m.trees[1].gaps, 2u);
  const Analysis a = Analyze(dir / "run", Options());
  EXPECT_EQ(a.excluded_partial, 1u);
  ASSERT_EQ(a.comparisons.size(), 1u);
  EXPECT_EQ(a.comparisons[0].a.n_trees, 3);
  EXPECT_EQ(a.comparisons[0].b.n_trees, 4);
  EXPECT_NE(RenderMarkdown(a).find("Partial trees excluded: 1"), std::string::npos);
}

TEST_F(RunTest, AnalyzeModes) {
  sockaudit::Run(spec, dir / "run", Scheduler::kSingleThreaded);
  AnalyzeOptions o = Options();
  const Analysis plain = Analyze(dir / "run", o);
  ASSERT_EQ(plain.comparisons.size(), 1u);
  EXPECT_EQ(plain.comparisons[0].name, "full vs partial");
  EXPECT_EQ(plain.comparisons[0].effects.size(), 3u);
  EXPECT_EQ(plain.spec_name, "small");

  o.split = true;
  const Analysis split = Analyze(dir / "run", o);
  ASSERT_EQ(split.comparisons.size(), 2u);
  EXPECT_EQ(split.comparisons[0].name, "set 1");
  EXPECT_EQ(split.comparisons[1].a.n_trees, 2);

  o.split = false;
  o.slice = SliceMode::kBreadth;
  o.characteristics = {Characteristic::kDiv};
  const Analysis breadth = Analyze(dir / "run", o);
  ASSERT_EQ(breadth.comparisons.size(), 1u);
  EXPECT_EQ(breadth.comparisons[0].a.label, "P_left");
  EXPECT_EQ(breadth.comparisons[0].b.label, "P_right");
  EXPECT_EQ(breadth.comparisons[0].a.n_trees, 8);
  ASSERT_EQ(breadth.comparisons[0].effects.size(), 1u);
  EXPECT_EQ(breadth.comparisons[0].effects[0].characteristic, Characteristic::kDiv);

  EXPECT_EQ(AnalysisFromJson(AnalysisToJson(breadth)).comparisons.size(), 1u);
  EXPECT_EQ(AnalysisToJson(AnalysisFromJson(AnalysisToJson(split))),
            AnalysisToJson(split));

  WriteAnalysis(split, dir / "out");
  for (const char* f : {"analysis.json", "report.csv", "report.md"}) {
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  }
}

TEST(CompareTreesTest, DepthSliceIgnoresMiddleDepths) {
  StreamRng rng(5);
  std::vector<RecommendationTree> a, b;
  for (int i = 0; i < 3; ++i) a.push_back(testing::RandomTree(rng, 3, 4));
  for (int i = 0; i < 3; ++i) b.push_back(testing::RandomTree(rng, 3, 4));
  AnalyzeOptions o;
  o.slice = SliceMode::kDepth;
  o.characteristics = {Characteristic::kPop, Characteristic::kDiv};
  o.bootstrap.n_resamples = 2000;
  const auto before = CompareTrees(a, b, "a", "b", o);

  auto bump = [](const RecommendationTree& t) {
    TreeParts parts{t.seed(), t.config_tag(), t.paths(), t.depth(), t.n_rec(),
                    t.columns(), t.nodes(), t.gaps()};
    for (auto& [pos, node] : parts.nodes) {
      if (pos.depth == 1 || pos.depth == t.depth()) continue;
      for (auto& v : node.recommendations) {
        v.views *= 1000;
        v.channel_id = "same";
      }
    }
    return RecommendationTree::FromParts(std::move(parts));
  };
  for (auto& t : a) t = bump(t);
  const auto after = CompareTrees(a, b, "a", "b", o);
  ASSERT_EQ(before.size(), 1u);
  EXPECT_EQ(before[0].name, "depth");
  EXPECT_EQ(before[0].a.label, "D_top");
  EXPECT_EQ(before[0].effects, after[0].effects);
}

TEST(CompareTreesTest, InsufficientData) {
  StreamRng rng(6);
  std::vector<RecommendationTree> a{testing::RandomTree(rng, 2, 2)};
  std::vector<RecommendationTree> b{testing::RandomTree(rng, 2, 2),
                                    testing::RandomTree(rng, 2, 2)};
  AnalyzeOptions o;
  o.bootstrap.n_resamples = 1000;
  EXPECT_THROW(CompareTrees(a, b, "a", "b", o), InsufficientDataError);
  a.push_back(testing::RandomTree(rng, 2, 2));
  o.split = true;
  EXPECT_THROW(CompareTrees(a, b, "a", "b", o), InsufficientDataError);
}

TEST(CompareTreesTest, InjectedShiftIsBold) {
  StreamRng rng(7);
  std::vector<RecommendationTree> a, b;
  for (int i = 0; i < 4; ++i) a.push_back(testing::RandomTree(rng, 3, 3));
  for (const auto& t : a) {
    TreeParts parts{t.seed(), "b", t.paths(), t.depth(), t.n_rec(),
                    t.columns(), t.nodes(), t.gaps()};
    for (auto& [pos, node] : parts.nodes) {
      for (auto& v : node.recommendations) v.views += 10'000'000;
    }
    b.push_back(RecommendationTree::FromParts(std::move(parts)));
  }
  AnalyzeOptions o;
  o.bootstrap.n_resamples = 5000;
  Analysis analysis;
  analysis.spec_name = "shift";
  analysis.n_resamples = 5000;
  analysis.comparisons = CompareTrees(a, b, "base", "shifted", o);
  const EffectReport& pop = analysis.comparisons[0].effects[0];
  ASSERT_EQ(pop.characteristic, Characteristic::kPop);
  EXPECT_TRUE(pop.significant99);
  EXPECT_NEAR(pop.mean_effect, -1e7, 0.05 * 1e7);

  const std::string md = RenderMarkdown(analysis);
  const std::size_t row = md.find("| base vs shifted | base | 4 |");
  ASSERT_NE(row, std::string::npos) << md;
  std::vector<std::string> cells;
  std::stringstream line(md.substr(row, md.find('\n', row) - row));
  for (std::string cell; std::getline(line, cell, '|');) cells.push_back(cell);
  ASSERT_GT(cells.size(), 6u);
  EXPECT_EQ(cells[5].substr(0, 5), " **[-") << cells[5];
  EXPECT_EQ(cells[6].substr(0, 5), " **[-") << cells[6];
  EXPECT_NE(md.find("# shift"), std::string::npos);
  const std::string csv = RenderCsv(analysis);
  EXPECT_EQ(csv.rfind("comparison,label_a,label_b,characteristic,", 0), 0u);
  EXPECT_NE(csv.find("\"base vs shifted\",\"base\",\"shifted\",pop,"), std::string::npos) << csv;
}

}  // namespace
}  // namespace sockaudit
