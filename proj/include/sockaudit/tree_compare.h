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

#ifndef SOCKAUDIT_TREE_COMPARE_H_
#define SOCKAUDIT_TREE_COMPARE_H_

#include <vector>

#include "sockaudit/node_metrics.h"
#include "sockaudit/tree.h"

namespace sockaudit {

// Mean node-to-node comparison of two trees. d_pop and d_div are mean
// differences (t minus u); d_sem is the mean cosine similarity of the node
// documents, not a difference.
struct TreeDelta {
  double d_pop = 0.0;
  double d_div = 0.0;
  double d_sem = 0.0;
  int n_aligned = 0;

  double Get(Characteristic c) const;
};

// Positions recorded in both trees, path-major then depth. Throws
// ValidationError when the shapes (P, D) differ.
std::vector<Position> Align(const RecommendationTree& t,
                            const RecommendationTree& u);
std::vector<Position> Align(const TreeMetrics& t, const TreeMetrics& u);

// Throws InsufficientDataError when no position aligns.
TreeDelta Delta(const TreeMetrics& t, const TreeMetrics& u);
TreeDelta Delta(const RecommendationTree& t, const RecommendationTree& u,
                const MetricsContext& ctx);

}  // namespace sockaudit

#endif  // SOCKAUDIT_TREE_COMPARE_H_
