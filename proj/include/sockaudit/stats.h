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

#ifndef SOCKAUDIT_STATS_H_
#define SOCKAUDIT_STATS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sockaudit/common.h"
#include "sockaudit/node_metrics.h"

namespace sockaudit {

enum class DiffKind { kWithin, kAcross };

struct TreeRef {
  int group = 0;
  int index = 0;

  friend bool operator==(const TreeRef&, const TreeRef&) = default;
};

// One delta value per tree pair. `pairs[k]` names the (first, second)
// trees behind `values[k]`; the tree-level bootstrap needs it.
struct DiffDistribution {
  Characteristic characteristic = Characteristic::kPop;
  DiffKind kind = DiffKind::kWithin;
  std::vector<double> values;
  std::vector<std::pair<TreeRef, TreeRef>> pairs;

  double Mean() const;
};

// delta(T_i, T_j) for every unordered pair i < j. Pairs that share no
// aligned node are skipped. Throws InsufficientDataError for < 2 trees.
DiffDistribution WithinGroup(std::span<const TreeMetrics> trees,
                             Characteristic c, int group = 0);

// delta(a_i, b_j) for every ordered pair, |a| x |b| values. Trees of `a`
// are tagged group 0 and trees of `b` group 1.
DiffDistribution AcrossGroup(std::span<const TreeMetrics> a,
                             std::span<const TreeMetrics> b,
                             Characteristic c);

// Concatenates two within-group distributions (e.g. both configurations'
// baselines). Throws ValidationError on mismatched characteristic/kind.
DiffDistribution Pool(const DiffDistribution& x, const DiffDistribution& y);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const ConfidenceInterval&,
                         const ConfidenceInterval&) = default;
};

// True iff both bounds are strictly negative or both strictly positive.
// Throws ValidationError when lower > upper.
bool IsSignificant(ConfidenceInterval ci);

enum class ResampleUnit {
  // Resample trees with replacement inside each group and recompute the
  // pair means from them. Pair deltas that share a tree are dependent;
  // this unit keeps that dependence.
  kTree,
  // Resample the pair-delta values themselves as if they were iid.
  kPairValue,
};

enum class IntervalMethod { kPercentile, kBca };

inline constexpr std::size_t kDefaultResamples = 1'000'000;
inline constexpr std::size_t kMinResamples = 1'000;

struct BootstrapOptions {
  std::size_t n_resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  ResampleUnit unit = ResampleUnit::kTree;
  IntervalMethod method = IntervalMethod::kPercentile;
  // 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned threads = 0;
};

struct EffectReport {
  Characteristic characteristic = Characteristic::kPop;
  double mean_within = 0.0;
  double mean_across = 0.0;
  // Mean of the bootstrap effect samples, effect = across - within.
  double mean_effect = 0.0;
  ConfidenceInterval ci95;
  ConfidenceInterval ci99;
  bool significant95 = false;
  bool significant99 = false;
  std::size_t n_resamples = 0;
  std::size_t n_within = 0;
  std::size_t n_across = 0;

  friend bool operator==(const EffectReport&, const EffectReport&) = default;
};

// Bootstrap distribution of mean(across) - mean(within). Throws
// ValidationError for empty inputs, mismatched characteristics or
// n_resamples < kMinResamples, and when the tree unit is requested but the
// distributions carry no pair provenance.
EffectReport BootstrapEffect(const DiffDistribution& within,
                             const DiffDistribution& across,
                             const BootstrapOptions& options = {});

// The raw effect samples, in resample order. Exposed for diagnostics.
std::vector<double> BootstrapEffectSamples(const DiffDistribution& within,
                                           const DiffDistribution& across,
                                           const BootstrapOptions& options);

// Linear-interpolation quantile of sorted data, q in [0, 1].
double QuantileSorted(std::span<const double> sorted, double q);

double NormalCdf(double x);
double NormalQuantile(double p);

}  // namespace sockaudit

#endif  // SOCKAUDIT_STATS_H_
