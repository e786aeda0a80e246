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

#include "sockaudit/node_metrics.h"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "sockaudit/tree_compare.h"
#include "support/random_trees.h"

namespace sockaudit {
namespace {

TreeNode NodeWith(const std::vector<std::pair<std::string, std::int64_t>>& recs) {
  TreeNode node;
  int k = 0;
  for (const auto& [channel, views] : recs) {
    VideoMeta v;
    v.video_id = "v" + std::to_string(k++);
    v.channel_id = channel;
    v.views = views;
    node.recommendations.push_back(v);
  }
  return node;
}

TEST(PopularityTest, MeanViews) {
  EXPECT_DOUBLE_EQ(Popularity(NodeWith({{"a", 1'000'000}, {"b", 3'000'000}})),
                   2'000'000.0);
  std::vector<std::pair<std::string, std::int64_t>> same(40, {"a", 777});
  EXPECT_DOUBLE_EQ(Popularity(NodeWith(same)), 777.0);
}

TEST(PopularityTest, MatchesSummationOracle) {
  StreamRng rng(8);
  std::vector<std::pair<std::string, std::int64_t>> recs;
  double sum = 0.0;
  for (int i = 0; i < 40; ++i) {
    const auto views = static_cast<std::int64_t>(UniformIndex(rng, 50'000'000));
    recs.emplace_back("c", views);
    sum += static_cast<double>(views);
  }
  EXPECT_NEAR(Popularity(NodeWith(recs)), sum / 40.0, 1e-6);
}

TEST(ChannelEntropyTest, KnownValues) {
  std::vector<std::pair<std::string, std::int64_t>> one(40, {"a", 1});
  EXPECT_EQ(ChannelEntropy(NodeWith(one)), 0.0);
  std::vector<std::pair<std::string, std::int64_t>> four;
  for (int i = 0; i < 40; ++i) four.emplace_back("c" + std::to_string(i % 4), 1);
  EXPECT_EQ(ChannelEntropy(NodeWith(four)), 2.0);
  std::vector<std::pair<std::string, std::int64_t>> mixed;
  for (int i = 0; i < 20; ++i) mixed.emplace_back("A", 1);
  for (int i = 0; i < 10; ++i) mixed.emplace_back("B", 1);
  for (int i = 0; i < 10; ++i) mixed.emplace_back("C", 1);
  EXPECT_NEAR(ChannelEntropy(NodeWith(mixed)), 1.5, 1e-15);
}

TEST(ShannonEntropyBitsTest, IgnoresZeroCounts) {
  EXPECT_DOUBLE_EQ(ShannonEntropyBits(std::vector<int>{1, 0, 1}), 1.0);
  EXPECT_EQ(ShannonEntropyBits(std::vector<int>{}), 0.0);
}

class NodeDocumentTest : public ::testing::Test {
 protected:
  CorpusStats stats = BuildCorpusStats(std::vector<std::string>{
      "solar eclipse", "lunar phases", "comet tails", "planet rings"});
  HashedEmbeddingProvider provider;
  MetricsContext ctx{&stats, &provider};
};

TEST_F(NodeDocumentTest, EmptyTextIsZero) {
  TreeNode node = NodeWith({{"a", 1}, {"b", 2}});
  EXPECT_EQ(NodeDocument(node, ctx).norm(), 0.0);
}

TEST_F(NodeDocumentTest, SingleDescription) {
  TreeNode node = NodeWith({{"a", 1}});
  node.recommendations[0].description = "solar eclipse";
  EXPECT_EQ(NodeDocument(node, ctx),
            Embed(Preprocess("solar eclipse", stats), provider));
}

TEST_F(NodeDocumentTest, DisjointVocabulariesUnion) {
  TreeNode node = NodeWith({{"a", 1}, {"b", 1}});
  node.recommendations[0].description = "solar eclipse";
  node.recommendations[1].description = "comet tails";
  const DocVector expected =
      Embed(TokenDoc{{"solar", "eclipse", "comet", "tail"}}, provider);
  EXPECT_TRUE(NodeDocument(node, ctx).isApprox(expected, 1e-14));
}

TEST(CorpusFromTreesTest, OneDocumentPerDistinctVideo) {
  StreamRng rng(9);
  const RecommendationTree t = testing::RandomTree(rng, 2, 1);
  std::set<std::string> ids;
  for (const auto& [pos, node] : t.nodes()) {
    for (const auto& r : node.recommendations) ids.insert(r.video_id);
  }
  const std::vector<RecommendationTree> trees{t, t};
  EXPECT_EQ(CorpusFromTrees(trees).doc_count, ids.size());
}

TEST(TreeMetricsTest, SliceReindexes) {
  StreamRng rng(10);
  const RecommendationTree t = testing::RandomTree(rng, 5, 10);
  const std::vector<RecommendationTree> trees{t};
  const CorpusStats stats = CorpusFromTrees(trees);
  const HashedEmbeddingProvider provider;
  const TreeMetrics m = TreeMetrics::Compute(t, {&stats, &provider});
  EXPECT_EQ(m.nodes().size(), 55u);
  const std::vector<int> paths{4}, depths{10};
  const TreeMetrics s = m.Slice(paths, depths);
  EXPECT_EQ(s.paths(), 1);
  EXPECT_EQ(s.depth(), 0);
  ASSERT_EQ(s.nodes().size(), 1u);
  EXPECT_EQ(s.at({0, 0})->pop, m.at({4, 10})->pop);
}

}  // namespace
}  // namespace sockaudit
