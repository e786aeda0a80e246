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

#ifndef SOCKAUDIT_TREE_H_
#define SOCKAUDIT_TREE_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sockaudit/common.h"

namespace sockaudit {

inline constexpr int kDefaultRecommendations = 40;

// A catalog entry, or one observed recommendation. `topic` is only set on
// simulator catalog entries; observations recorded in trees never carry it.
struct VideoMeta {
  std::string video_id;
  std::string channel_id;
  std::int64_t views = 0;
  std::int64_t duration_s = 0;
  std::string title;
  std::string description;
  std::optional<Vector> topic;

  friend bool operator==(const VideoMeta& a, const VideoMeta& b);
};

struct Position {
  int path = 0;
  int depth = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

struct TreeNode {
  int path = 0;
  int depth = 0;
  std::string watched;
  // Platform rank order; index 0 is the top recommendation.
  std::vector<VideoMeta> recommendations;
  // The scheduled column was past the end of the parent's list.
  bool clamped = false;
  // World epoch the observation was taken in.
  std::int64_t epoch = 0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct CrawlGap {
  int path = 0;
  int depth = 0;
  std::string reason;

  friend bool operator==(const CrawlGap&, const CrawlGap&) = default;
};

// One depth of one sock-puppet's walk.
struct Observation {
  int depth = 0;
  std::string watched;
  std::vector<VideoMeta> recommendations;
  bool clamped = false;
  std::int64_t epoch = 0;
};

// Everything one sock-puppet saw along its path. A crawl that dies sets
// `failure`; depths it never reached become gaps in the tree.
struct PathRecord {
  int column = -1;
  std::vector<Observation> observations;
  std::optional<std::string> failure;
};

struct TreeShape {
  int depth = 10;
  int n_rec = kDefaultRecommendations;
};

// Raw fields of a tree, before invariant checks.
struct TreeParts {
  std::string seed;
  std::string config_tag;
  int paths = 0;
  int depth = 0;
  int n_rec = kDefaultRecommendations;
  std::vector<int> columns;
  std::map<Position, TreeNode> nodes;
  std::vector<CrawlGap> gaps;
};

// P root-to-leaf paths of depth D stitched into one tree. Immutable once
// built; node_at never fabricates a node for a gap.
class RecommendationTree {
 public:
  RecommendationTree() = default;

  // Validates every tree invariant and throws ValidationError on the first
  // violation: shape, index ranges, root == seed, list length in
  // [1, n_rec], non-negative counts, and that each position is either a
  // node or a recorded gap (never both, never neither).
  static RecommendationTree FromParts(TreeParts parts);

  const std::string& seed() const { return seed_; }
  const std::string& config_tag() const { return config_tag_; }
  int paths() const { return paths_; }
  int depth() const { return depth_; }
  int n_rec() const { return n_rec_; }
  const std::vector<int>& columns() const { return columns_; }
  const std::map<Position, TreeNode>& nodes() const { return nodes_; }
  const std::vector<CrawlGap>& gaps() const { return gaps_; }

  // Throws std::out_of_range for indices outside [0,P) x [0,D]; returns
  // nullptr for a recorded gap.
  const TreeNode* node_at(int path, int depth) const;

  std::size_t size() const { return nodes_.size(); }
  bool complete() const { return gaps_.empty(); }

  friend bool operator==(const RecommendationTree&,
                         const RecommendationTree&) = default;

 private:
  std::string seed_;
  std::string config_tag_;
  int paths_ = 0;
  int depth_ = 0;
  int n_rec_ = kDefaultRecommendations;
  std::vector<int> columns_;
  std::map<Position, TreeNode> nodes_;
  std::vector<CrawlGap> gaps_;
};

// Stitches per-path records into a tree. Recommendation lists longer than
// shape.n_rec are truncated. Throws ValidationError on a record whose root
// does not watch `seed`, on duplicate (path, depth) observations, on depths
// outside [0, shape.depth] and on empty recommendation lists.
RecommendationTree BuildTree(std::string seed,
                             std::span<const PathRecord> records,
                             std::string config_tag, TreeShape shape);

enum class ParseMode { kStrict, kLenient };

std::string Serialize(const RecommendationTree& tree);
RecommendationTree Deserialize(std::string_view document,
                               ParseMode mode = ParseMode::kStrict);

}  // namespace sockaudit

#endif  // SOCKAUDIT_TREE_H_
