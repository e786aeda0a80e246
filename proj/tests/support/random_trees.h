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

#ifndef SOCKAUDIT_TESTS_SUPPORT_RANDOM_TREES_H_
#define SOCKAUDIT_TESTS_SUPPORT_RANDOM_TREES_H_

#include <cmath>
#include <string>
#include <vector>

#include "sockaudit/rng.h"
#include "sockaudit/tree.h"

namespace sockaudit::testing {

inline std::string RandomWords(StreamRng& rng, int n, int vocabulary) {
  static const char* const kSyllables[] = {"ka", "lo", "mi", "ru", "te",
                                           "za", "po", "ne", "vi", "su"};
  std::string text;
  for (int i = 0; i < n; ++i) {
    const std::size_t w = UniformIndex(rng, static_cast<std::size_t>(vocabulary));
    if (!text.empty()) text += ' ';
    text += kSyllables[w % 10];
    text += kSyllables[(w / 10) % 10];
    text += kSyllables[(w / 100) % 10];
  }
  return text;
}

inline VideoMeta RandomVideo(StreamRng& rng, int channels) {
  VideoMeta v;
  v.video_id = "v" + std::to_string(UniformIndex(rng, 100000));
  v.channel_id = "c" + std::to_string(UniformIndex(rng, static_cast<std::size_t>(channels)));
  v.views = static_cast<std::int64_t>(std::exp(9.0 + 2.0 * UniformDouble(rng)));
  v.duration_s = 60 + static_cast<std::int64_t>(UniformIndex(rng, 1200));
  v.title = RandomWords(rng, 5, 400);
  v.description = RandomWords(rng, 12, 400);
  return v;
}

// A gap-free tree of random recommendation lists (1..n_rec entries).
inline RecommendationTree RandomTree(StreamRng& rng, int paths, int depth,
                                     int n_rec = 40, int channels = 12,
                                     const std::string& seed = "seed") {
  TreeParts parts;
  parts.seed = seed;
  parts.config_tag = "random";
  parts.paths = paths;
  parts.depth = depth;
  parts.n_rec = n_rec;
  for (int p = 0; p < paths; ++p) {
    parts.columns.push_back(p == paths - 1 ? n_rec - 1 : p);
    for (int d = 0; d <= depth; ++d) {
      TreeNode node;
      node.path = p;
      node.depth = d;
      node.epoch = d;
      node.watched = d == 0 ? seed : "w" + std::to_string(UniformIndex(rng, 100000));
      const std::size_t n = 1 + UniformIndex(rng, static_cast<std::size_t>(n_rec));
      for (std::size_t k = 0; k < n; ++k) {
        node.recommendations.push_back(RandomVideo(rng, channels));
      }
      parts.nodes.emplace(Position{p, d}, std::move(node));
    }
  }
  return RecommendationTree::FromParts(std::move(parts));
}

}  // namespace sockaudit::testing

#endif  // SOCKAUDIT_TESTS_SUPPORT_RANDOM_TREES_H_
