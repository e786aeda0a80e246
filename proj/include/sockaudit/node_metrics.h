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

#ifndef SOCKAUDIT_NODE_METRICS_H_
#define SOCKAUDIT_NODE_METRICS_H_

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sockaudit/text.h"
#include "sockaudit/tree.h"

namespace sockaudit {

struct NodeMetrics {
  double pop = 0.0;  // mean views
  double div = 0.0;  // channel entropy, bits
  DocVector doc;
};

// What `doc` needs: corpus statistics for the experiment, an embedding
// provider and the lexicon. Non-owning.
struct MetricsContext {
  const CorpusStats* stats = nullptr;
  const EmbeddingProvider* provider = nullptr;
  const Lexicon* lexicon = &Lexicon::Bundled();
};

// Plug-in Shannon entropy in bits of a multiset given by its counts.
template <typename Counts>
double ShannonEntropyBits(const Counts& counts) {
  double total = 0.0;
  for (const auto& c : counts) total += static_cast<double>(c);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const auto& c : counts) {
    if (c <= 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

// Mean view count of the node's recommendations.
double Popularity(const TreeNode& node);

// Median variant; not used by the default pipeline.
double PopularityMedian(const TreeNode& node);

double ChannelEntropy(const TreeNode& node);

// Title and description of every recommendation, joined.
std::string NodeText(const TreeNode& node);

// Preprocesses NodeText once and embeds it.
DocVector NodeDocument(const TreeNode& node, const MetricsContext& ctx);

NodeMetrics ComputeNodeMetrics(const TreeNode& node, const MetricsContext& ctx);

// One document per distinct video (title + " " + description) over every
// recommendation observed in `trees`.
CorpusStats CorpusFromTrees(std::span<const RecommendationTree> trees);

// Node metrics of a whole tree, keyed by position. Shape mirrors the tree,
// minus gaps.
class TreeMetrics {
 public:
  TreeMetrics() = default;
  TreeMetrics(int paths, int depth, std::map<Position, NodeMetrics> nodes);

  static TreeMetrics Compute(const RecommendationTree& tree,
                             const MetricsContext& ctx);

  int paths() const { return paths_; }
  int depth() const { return depth_; }
  const std::map<Position, NodeMetrics>& nodes() const { return nodes_; }
  const NodeMetrics* at(const Position& pos) const;

  // Keeps only `paths` x `depths`, re-indexed from 0 in the given order.
  TreeMetrics Slice(std::span<const int> paths,
                    std::span<const int> depths) const;

 private:
  int paths_ = 0;
  int depth_ = 0;
  std::map<Position, NodeMetrics> nodes_;
};

}  // namespace sockaudit

#endif  // SOCKAUDIT_NODE_METRICS_H_
