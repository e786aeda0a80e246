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

#include <algorithm>
#include <map>
#include <numeric>

namespace sockaudit {

double Popularity(const TreeNode& node) {
  if (node.recommendations.empty()) {
    throw ValidationError("pop of a node without recommendations");
  }
  double sum = 0.0;
  for (const auto& rec : node.recommendations) {
    sum += static_cast<double>(rec.views);
  }
  return sum / static_cast<double>(node.recommendations.size());
}

double PopularityMedian(const TreeNode& node) {
  if (node.recommendations.empty()) {
    throw ValidationError("pop of a node without recommendations");
  }
  std::vector<double> views;
  views.reserve(node.recommendations.size());
  for (const auto& rec : node.recommendations) {
    views.push_back(static_cast<double>(rec.views));
  }
  std::sort(views.begin(), views.end());
  const std::size_t n = views.size();
  return n % 2 == 1 ? views[n / 2] : 0.5 * (views[n / 2 - 1] + views[n / 2]);
}

double ChannelEntropy(const TreeNode& node) {
  if (node.recommendations.empty()) {
    throw ValidationError("div of a node without recommendations");
  }
  std::map<std::string_view, int> counts;
  for (const auto& rec : node.recommendations) ++counts[rec.channel_id];
  std::vector<int> values;
  values.reserve(counts.size());
  for (const auto& [channel, count] : counts) values.push_back(count);
  return ShannonEntropyBits(values);
}

std::string NodeText(const TreeNode& node) {
  std::string text;
  for (const auto& rec : node.recommendations) {
    text += rec.title;
    text += '\n';
    text += rec.description;
    text += '\n';
  }
  return text;
}

DocVector NodeDocument(const TreeNode& node, const MetricsContext& ctx) {
  if (ctx.stats == nullptr || ctx.provider == nullptr ||
      ctx.lexicon == nullptr) {
    throw std::invalid_argument("MetricsContext is incomplete");
  }
  return Embed(Preprocess(NodeText(node), *ctx.stats, *ctx.lexicon),
               *ctx.provider);
}

NodeMetrics ComputeNodeMetrics(const TreeNode& node,
                               const MetricsContext& ctx) {
  return NodeMetrics{Popularity(node), ChannelEntropy(node),
                     NodeDocument(node, ctx)};
}

CorpusStats CorpusFromTrees(std::span<const RecommendationTree> trees) {
  std::map<std::string, std::string> texts;
  for (const auto& tree : trees) {
    for (const auto& [pos, node] : tree.nodes()) {
      for (const auto& rec : node.recommendations) {
        texts.try_emplace(rec.video_id, rec.title + " " + rec.description);
      }
    }
  }
  std::vector<std::string> docs;
  docs.reserve(texts.size());
  for (auto& [id, text] : texts) docs.push_back(std::move(text));
  return BuildCorpusStats(docs);
}

TreeMetrics::TreeMetrics(int paths, int depth,
                         std::map<Position, NodeMetrics> nodes)
    : paths_(paths), depth_(depth), nodes_(std::move(nodes)) {}

TreeMetrics TreeMetrics::Compute(const RecommendationTree& tree,
                                 const MetricsContext& ctx) {
  std::map<Position, NodeMetrics> nodes;
  for (const auto& [pos, node] : tree.nodes()) {
    nodes.emplace(pos, ComputeNodeMetrics(node, ctx));
  }
  return TreeMetrics(tree.paths(), tree.depth(), std::move(nodes));
}

const NodeMetrics* TreeMetrics::at(const Position& pos) const {
  auto it = nodes_.find(pos);
  return it == nodes_.end() ? nullptr : &it->second;
}

TreeMetrics TreeMetrics::Slice(std::span<const int> paths,
                               std::span<const int> depths) const {
  if (paths.empty() || depths.empty()) {
    throw ValidationError("empty slice");
  }
  std::map<Position, NodeMetrics> nodes;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = 0; j < depths.size(); ++j) {
      if (paths[i] < 0 || paths[i] >= paths_ || depths[j] < 0 ||
          depths[j] > depth_) {
        throw ValidationError("slice outside tree shape");
      }
      if (const NodeMetrics* m = at(Position{paths[i], depths[j]})) {
        nodes.emplace(Position{static_cast<int>(i), static_cast<int>(j)}, *m);
      }
    }
  }
  return TreeMetrics(static_cast<int>(paths.size()),
                     static_cast<int>(depths.size()) - 1, std::move(nodes));
}

}  // namespace sockaudit
