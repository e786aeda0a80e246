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

#ifndef SOCKAUDIT_REPORT_H_
#define SOCKAUDIT_REPORT_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sockaudit/stats.h"
#include "sockaudit/tree.h"

namespace sockaudit {

enum class SliceMode {
  kNone,
  // Leftmost vs rightmost path of every tree.
  kBreadth,
  // Depth 1 vs depth D of every tree.
  kDepth,
};

std::string_view ToString(SliceMode mode);
SliceMode ParseSliceMode(std::string_view name);

struct AnalyzeOptions {
  std::vector<Characteristic> characteristics{std::begin(kAllCharacteristics),
                                              std::end(kAllCharacteristics)};
  // Two disjoint halves per group, one comparison each.
  bool split = false;
  SliceMode slice = SliceMode::kNone;
  BootstrapOptions bootstrap;
};

struct GroupSummary {
  std::string label;
  int n_trees = 0;
  double mean_views = 0.0;    // grand mean of node pop
  double mean_entropy = 0.0;  // grand mean of node div, bits
};

struct Comparison {
  std::string name;
  GroupSummary a;
  GroupSummary b;
  std::vector<EffectReport> effects;  // in AnalyzeOptions order
};

struct Analysis {
  std::string spec_name;
  std::string spec_hash;
  SliceMode slice = SliceMode::kNone;
  bool split = false;
  std::size_t n_resamples = 0;
  std::uint64_t seed = 0;
  std::size_t excluded_partial = 0;
  std::vector<Comparison> comparisons;
};

// Compares two groups of trees. Node documents use corpus statistics over
// every tree passed in. Throws InsufficientDataError with fewer than 2
// trees per compared group (4 in split mode).
std::vector<Comparison> CompareTrees(std::span<const RecommendationTree> a,
                                     std::span<const RecommendationTree> b,
                                     const std::string& label_a,
                                     const std::string& label_b,
                                     const AnalyzeOptions& options);

// Loads a run directory and compares its complete trees. Partial trees are
// excluded and counted.
Analysis Analyze(const std::filesystem::path& run_dir,
                 const AnalyzeOptions& options);

nlohmann::json AnalysisToJson(const Analysis& analysis);
Analysis AnalysisFromJson(const nlohmann::json& doc);

// One row per comparison per characteristic, raw units.
std::string RenderCsv(const Analysis& analysis);
// Two rows per comparison; views in millions, 2 decimals, significant
// intervals in bold.
std::string RenderMarkdown(const Analysis& analysis);

// Writes analysis.json, report.csv and report.md into `dir`.
void WriteAnalysis(const Analysis& analysis, const std::filesystem::path& dir);

}  // namespace sockaudit

#endif  // SOCKAUDIT_REPORT_H_
