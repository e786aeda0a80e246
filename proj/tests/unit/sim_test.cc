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

#include "sockaudit/sim.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace sockaudit {
namespace {

BiasParams Quiet() {
  BiasParams p;
  p.account_mode_noise = {{AccountMode::kFull, 0.0},
                          {AccountMode::kCookies, 0.0},
                          {AccountMode::kClear, 0.0}};
  return p;
}

double LogViewSd(const SimWorld& w) {
  double m = 0.0;
  for (const auto& v : w.catalog()) m += std::log(static_cast<double>(v.views));
  m /= static_cast<double>(w.size());
  double s = 0.0;
  for (const auto& v : w.catalog()) {
    const double d = std::log(static_cast<double>(v.views)) - m;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(w.size()));
}

TEST(SimWorldTest, GenerationIsDeterministic) {
  const SimWorld a = SimWorld::Generate(BiasParams{}, 7, 1000, 40);
  const SimWorld b = SimWorld::Generate(BiasParams{}, 7, 1000, 40);
  const SimWorld c = SimWorld::Generate(BiasParams{}, 8, 1000, 40);
  EXPECT_EQ(a.catalog(), b.catalog());
  EXPECT_NE(a.catalog(), c.catalog());
  EXPECT_EQ(a.size(), 1000u);
  EXPECT_EQ(a.catalog()[0].video_id, "v00000");
  EXPECT_EQ(a.RequireIndex("v00017"), 17u);
  EXPECT_FALSE(a.IndexOf("nope").has_value());
  EXPECT_THROW(a.RequireIndex("nope"), ValidationError);
}

TEST(SimWorldTest, ViewSpreadScalesWithSigma) {
  BiasParams narrow;
  narrow.views_log_sigma = 1.0;
  BiasParams wide = narrow;
  wide.views_log_sigma = 2.0;
  const double s1 = LogViewSd(SimWorld::Generate(narrow, 3, 4000, 50));
  const double s2 = LogViewSd(SimWorld::Generate(wide, 3, 4000, 50));
  EXPECT_NEAR(s2 / s1, 2.0, 0.2);
}

TEST(SimWorldTest, TwoChannelsSuffice) {
  const SimWorld w = SimWorld::Generate(BiasParams{}, 1, 400, 2);
  std::set<std::string> channels;
  for (const auto& v : w.catalog()) channels.insert(v.channel_id);
  EXPECT_EQ(channels.size(), 2u);
}

TEST(SimWorldTest, RejectsSmallCatalogs) {
  EXPECT_THROW(SimWorld::Generate(BiasParams{}, 1, 399, 10), ValidationError);
  EXPECT_THROW(SimWorld::Generate(BiasParams{}, 1, 400, 1), ValidationError);
  BiasParams bad;
  bad.depth_decay = 1.5;
  EXPECT_THROW(SimWorld::Generate(bad, 1, 400, 10), ValidationError);
}

TEST(SimWorldTest, ByTopicSimilarityStartsAtAnchor) {
  const SimWorld w = SimWorld::Generate(BiasParams{}, 4, 500, 20);
  const auto order = w.ByTopicSimilarity(12);
  ASSERT_EQ(order.size(), w.size());
  EXPECT_EQ(order[0], 12u);
  const Vector& a = *w.catalog()[12].topic;
  for (std::size_t k = 2; k < order.size(); ++k) {
    EXPECT_GE(a.dot(*w.catalog()[order[k - 1]].topic),
              a.dot(*w.catalog()[order[k]].topic));
  }
  EXPECT_THROW(w.ByTopicSimilarity(500), ValidationError);
}

class SessionTest : public ::testing::Test {
 protected:
  SimWorld world = SimWorld::Generate(BiasParams{}, 11, 600, 30);
};

TEST_F(SessionTest, ThresholdDecidesInfluence) {
  PuppetSession s(AccountMode::kFull, 1, "p");
  s.RegisterWatch(world, "v00001", 60);
  s.RegisterWatch(world, "v00002", 20);
  s.RegisterWatch(world, "v00003", 0);
  s.RegisterWatch(world, "v00004", 30);
  ASSERT_EQ(s.history().size(), 4u);
  EXPECT_TRUE(s.history()[0].influences);
  EXPECT_FALSE(s.history()[1].influences);
  EXPECT_FALSE(s.history()[2].influences);
  EXPECT_TRUE(s.history()[3].influences);
  EXPECT_EQ(s.influence_count(), 2u);
  EXPECT_THROW(s.RegisterWatch(world, "v00001", -1), ValidationError);
  EXPECT_THROW(s.RegisterWatch(world, "zzz", 60), ValidationError);
}

TEST_F(SessionTest, ClearHistory) {
  PuppetSession full(AccountMode::kFull, 1, "p");
  full.RegisterWatch(world, "v00001", 60);
  full.ClearHistory();
  EXPECT_TRUE(full.history().empty());
  EXPECT_EQ(full.influence_count(), 0u);
  full.ClearHistory();
  EXPECT_TRUE(full.history().empty());

  PuppetSession cookies(AccountMode::kCookies, 1, "p");
  EXPECT_THROW(cookies.ClearHistory(), ValidationError);
}

TEST(RecommendTest, PopularityOnlyGivesMostViewed) {
  BiasParams p = Quiet();
  p.recency_weight = 0.0;
  p.history_weight = 0.0;
  const SimWorld w = SimWorld::Generate(p, 5, 500, 20);
  PuppetSession s(AccountMode::kFull, 1, "p");
  const std::string current = w.catalog()[w.ByViews()[0]].video_id;
  const auto recs = Recommend(w, s, current, 40);
  ASSERT_EQ(recs.size(), 40u);
  const auto by_views = w.ByViews();
  for (std::size_t k = 0; k < 40; ++k) {
    EXPECT_EQ(recs[k].video_id, w.catalog()[by_views[k + 1]].video_id);
    EXPECT_FALSE(recs[k].topic.has_value());
  }
}

TEST(RecommendTest, RecencyOnlyGivesNearestNeighbours) {
  BiasParams p = Quiet();
  p.popularity_weight = 0.0;
  p.history_weight = 0.0;
  const SimWorld w = SimWorld::Generate(p, 5, 500, 20);
  PuppetSession s(AccountMode::kFull, 1, "p");
  const auto recs = Recommend(w, s, "v00042", 10);
  const auto order = w.ByTopicSimilarity(42);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_EQ(recs[k].video_id, w.catalog()[order[k + 1]].video_id);
  }
}

TEST(RecommendTest, ScoresMatchBruteForce) {
  BiasParams p = Quiet();
  p.popularity_weight = 1.3;
  p.recency_weight = 0.7;
  p.history_weight = 0.4;
  p.depth_decay = 0.9;
  WorldOptions o;
  o.n_rec = 10;
  const SimWorld w = SimWorld::Generate(p, 21, 100, 10, o);
  PuppetSession s(AccountMode::kFull, 1, "p");
  s.RegisterWatch(w, "v00003", 100);
  s.RegisterWatch(w, "v00009", 100);
  RecommendContext ctx;
  ctx.depth = 2;
  const Vector scores = RecommendationScores(w, s, 5, ctx);

  double mean = 0.0;
  for (const auto& v : w.catalog()) mean += std::log1p(static_cast<double>(v.views));
  mean /= 100.0;
  double var = 0.0;
  for (const auto& v : w.catalog()) {
    const double d = std::log1p(static_cast<double>(v.views)) - mean;
    var += d * d;
  }
  const double sd = std::sqrt(var / 100.0);
  const Vector hist = *w.catalog()[3].topic + *w.catalog()[9].topic;
  const Vector& cur = *w.catalog()[5].topic;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& v = w.catalog()[i];
    const double z = (std::log1p(static_cast<double>(v.views)) - mean) / sd;
    const double expected = 1.3 * 0.81 * z + 0.7 * v.topic->dot(cur) +
                            0.4 * v.topic->dot(hist) / hist.norm();
    EXPECT_NEAR(scores[static_cast<Eigen::Index>(i)], expected, 1e-9) << i;
  }
}

TEST(RecommendTest, ExcludesCurrentAndIsReproducible) {
  const SimWorld w = SimWorld::Generate(BiasParams{}, 5, 500, 20);
  PuppetSession s1(AccountMode::kFull, 9, "p");
  PuppetSession s2(AccountMode::kFull, 9, "p");
  const auto r1 = Recommend(w, s1, "v00001", 40);
  const auto r2 = Recommend(w, s2, "v00001", 40);
  EXPECT_EQ(r1, r2);
  for (const auto& v : r1) EXPECT_NE(v.video_id, "v00001");
  EXPECT_THROW(Recommend(w, s1, "v00001", 500), ValidationError);
}

}  // namespace
}  // namespace sockaudit
