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

#include "sockaudit/tree_compare.h"

#include <string>

namespace sockaudit {

double TreeDelta::Get(Characteristic c) const {
  switch (c) {
    case Characteristic::kPop:
      return d_pop;
    case Characteristic::kDiv:
      return d_div;
    case Characteristic::kSem:
      return d_sem;
  }
  return 0.0;
}

namespace {

void CheckShape(int tp, int td, int up, int ud) {
  if (tp != up || td != ud) {
    throw ValidationError("tree shapes differ: P=" + std::to_string(tp) +
                          ",D=" + std::to_string(td) + " vs P=" +
                          std::to_string(up) + ",D=" + std::to_string(ud));
  }
}

template <typename NodeMap>
std::vector<Position> Intersect(const NodeMap& a, const NodeMap& b) {
  // std::map iteration is already path-major, depth-minor.
  std::vector<Position> out;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      out.push_back(ia->first);
      ++ia;
      ++ib;
    }
  }
  return out;
}

}  // namespace

std::vector<Position> Align(const RecommendationTree& t,
                            const RecommendationTree& u) {
  CheckShape(t.paths(), t.depth(), u.paths(), u.depth());
  return Intersect(t.nodes(), u.nodes());
}

std::vector<Position> Align(const TreeMetrics& t, const TreeMetrics& u) {
  CheckShape(t.paths(), t.depth(), u.paths(), u.depth());
  return Intersect(t.nodes(), u.nodes());
}

TreeDelta Delta(const TreeMetrics& t, const TreeMetrics& u) {
  const std::vector<Position> positions = Align(t, u);
  if (positions.empty()) {
    throw InsufficientDataError("trees share no node positions");
  }
  TreeDelta d;
  for (const Position& pos : positions) {
    const NodeMetrics& a = *t.at(pos);
    const NodeMetrics& b = *u.at(pos);
    d.d_pop += a.pop - b.pop;
    d.d_div += a.div - b.div;
    d.d_sem += DocSim(a.doc, b.doc);
  }
  const double n = static_cast<double>(positions.size());
  d.d_pop /= n;
  d.d_div /= n;
  d.d_sem /= n;
  d.n_aligned = static_cast<int>(positions.size());
  return d;
}

TreeDelta Delta(const RecommendationTree& t, const RecommendationTree& u,
                const MetricsContext& ctx) {
  return Delta(TreeMetrics::Compute(t, ctx), TreeMetrics::Compute(u, ctx));
}

}  // namespace sockaudit
