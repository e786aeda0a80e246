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

#include "sockaudit/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <utility>

#include "sockaudit/rng.h"
#include "sockaudit/tree_compare.h"

namespace sockaudit {

double DiffDistribution::Mean() const {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

DiffDistribution WithinGroup(std::span<const TreeMetrics> trees,
                             Characteristic c, int group) {
  if (trees.size() < 2) {
    throw InsufficientDataError("within-group differences need >= 2 trees");
  }
  DiffDistribution out{c, DiffKind::kWithin, {}, {}};
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (std::size_t j = i + 1; j < trees.size(); ++j) {
      if (Align(trees[i], trees[j]).empty()) continue;
      out.values.push_back(Delta(trees[i], trees[j]).Get(c));
      out.pairs.emplace_back(TreeRef{group, static_cast<int>(i)},
                             TreeRef{group, static_cast<int>(j)});
    }
  }
  if (out.values.empty()) {
    throw InsufficientDataError("no tree pair in the group shares a node");
  }
  return out;
}

DiffDistribution AcrossGroup(std::span<const TreeMetrics> a,
                             std::span<const TreeMetrics> b,
                             Characteristic c) {
  if (a.empty() || b.empty()) {
    throw InsufficientDataError("across-group differences need two non-empty sets");
  }
  DiffDistribution out{c, DiffKind::kAcross, {}, {}};
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (Align(a[i], b[j]).empty()) continue;
      out.values.push_back(Delta(a[i], b[j]).Get(c));
      out.pairs.emplace_back(TreeRef{0, static_cast<int>(i)},
                             TreeRef{1, static_cast<int>(j)});
    }
  }
  if (out.values.empty()) {
    throw InsufficientDataError("no across-group tree pair shares a node");
  }
  return out;
}

DiffDistribution Pool(const DiffDistribution& x, const DiffDistribution& y) {
  if (x.characteristic != y.characteristic || x.kind != y.kind) {
    throw ValidationError("cannot pool distributions of different kinds");
  }
  DiffDistribution out = x;
  out.values.insert(out.values.end(), y.values.begin(), y.values.end());
  if (!x.pairs.empty() || !y.pairs.empty()) {
    if (x.pairs.size() != x.values.size() ||
        y.pairs.size() != y.values.size()) {
      throw ValidationError("cannot pool distributions with partial provenance");
    }
    out.pairs.insert(out.pairs.end(), y.pairs.begin(), y.pairs.end());
  }
  return out;
}

bool IsSignificant(ConfidenceInterval ci) {
  if (ci.lower > ci.upper) {
    throw ValidationError("confidence interval lower bound exceeds upper bound");
  }
  return (ci.upper < 0.0) || (ci.lower > 0.0);
}

double QuantileSorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("quantile of empty sample");
  q = std::clamp(q, 0.0, 1.0);
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalQuantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  // Acklam's rational approximation, then one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = NormalCdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

void CheckInputs(const DiffDistribution& within, const DiffDistribution& across,
                 const BootstrapOptions& options) {
  if (within.values.empty() || across.values.empty()) {
    throw ValidationError("bootstrap needs non-empty within and across distributions");
  }
  if (within.characteristic != across.characteristic) {
    throw ValidationError("within/across characteristics differ");
  }
  if (options.n_resamples < kMinResamples) {
    throw ValidationError("n_resamples must be >= " +
                          std::to_string(kMinResamples));
  }
  if (options.unit == ResampleUnit::kTree &&
      (within.pairs.size() != within.values.size() ||
       across.pairs.size() != across.values.size())) {
    throw ValidationError(
        "tree-level bootstrap needs tree-pair provenance on every value");
  }
}

// Dense delta matrices indexed by tree, so a resample only needs tree
// indices.
class TreeLevelModel {
 public:
  TreeLevelModel(const DiffDistribution& within, const DiffDistribution& across)
      : antisymmetric_(IsAntisymmetric(within.characteristic)) {
    auto note = [&](const TreeRef& r) {
      int& n = group_size_[r.group];
      n = std::max(n, r.index + 1);
    };
    for (const auto& [x, y] : within.pairs) {
      if (x.group != y.group) {
        throw ValidationError("within-group pair spans two groups");
      }
      note(x);
      note(y);
    }
    for (const auto& [x, y] : across.pairs) {
      if (x.group == y.group) {
        throw ValidationError("across-group pair inside one group");
      }
      note(x);
      note(y);
    }
    for (const auto& [g, n] : group_size_) {
      slot_[g] = static_cast<int>(groups_.size());
      groups_.push_back(g);
      sizes_.push_back(n);
    }
    for (std::size_t k = 0; k < within.values.size(); ++k) {
      const auto& [x, y] = within.pairs[k];
      Matrix& m = Block(x.group, x.group);
      m(x.index, y.index) = within.values[k];
      m(y.index, x.index) =
          antisymmetric_ ? -within.values[k] : within.values[k];
      within_groups_.insert(slot_[x.group]);
    }
    for (std::size_t k = 0; k < across.values.size(); ++k) {
      const auto& [x, y] = across.pairs[k];
      Block(x.group, y.group)(x.index, y.index) = across.values[k];
      across_blocks_.insert({slot_[x.group], slot_[y.group]});
    }
  }

  std::size_t group_count() const { return groups_.size(); }
  int size(std::size_t slot) const { return sizes_[slot]; }

  // Effect for one assignment of tree indices per group (draws[slot][p]).
  // `skip` excludes one (slot, tree) for the jackknife; -1 keeps all.
  std::pair<double, double> Means(const std::vector<std::vector<int>>& draws,
                                  int skip_slot = -1, int skip_tree = -1) const {
    auto skipped = [&](std::size_t slot, int tree) {
      return static_cast<int>(slot) == skip_slot && tree == skip_tree;
    };
    double w_sum = 0.0;
    std::size_t w_n = 0;
    for (int slot : within_groups_) {
      const Matrix& m = blocks_.at({slot, slot});
      const auto& idx = draws[slot];
      for (std::size_t p = 0; p < idx.size(); ++p) {
        if (skipped(slot, idx[p])) continue;
        for (std::size_t q = p + 1; q < idx.size(); ++q) {
          if (idx[p] == idx[q] || skipped(slot, idx[q])) continue;
          const double v = m(idx[p], idx[q]);
          if (std::isnan(v)) continue;
          w_sum += v;
          ++w_n;
        }
      }
    }
    double a_sum = 0.0;
    std::size_t a_n = 0;
    for (const auto& [s1, s2] : across_blocks_) {
      const Matrix& m = blocks_.at({s1, s2});
      for (int i : draws[s1]) {
        if (skipped(s1, i)) continue;
        for (int j : draws[s2]) {
          if (skipped(s2, j)) continue;
          const double v = m(i, j);
          if (std::isnan(v)) continue;
          a_sum += v;
          ++a_n;
        }
      }
    }
    return {w_n ? w_sum / static_cast<double>(w_n) : kMissing,
            a_n ? a_sum / static_cast<double>(a_n) : kMissing};
  }

 private:
  Matrix& Block(int g1, int g2) {
    const std::pair<int, int> key{slot_[g1], slot_[g2]};
    auto it = blocks_.find(key);
    if (it == blocks_.end()) {
      it = blocks_
               .emplace(key, Matrix::Constant(group_size_[g1], group_size_[g2],
                                              kMissing))
               .first;
    }
    return it->second;
  }

  bool antisymmetric_;
  std::map<int, int> group_size_;
  std::map<int, int> slot_;
  std::vector<int> groups_;
  std::vector<int> sizes_;
  std::set<int> within_groups_;
  std::set<std::pair<int, int>> across_blocks_;
  std::map<std::pair<int, int>, Matrix> blocks_;
};

template <typename Fn>
void ParallelFor(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, n / 4096)));
  if (threads <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> workers;
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

double Effect(double within_mean, double across_mean, double within_obs,
              double across_obs) {
  if (std::isnan(within_mean)) within_mean = within_obs;
  if (std::isnan(across_mean)) across_mean = across_obs;
  return across_mean - within_mean;
}

// Leave-one-out replicates of the effect, for the BCa acceleration.
std::vector<double> Jackknife(const DiffDistribution& within,
                              const DiffDistribution& across,
                              const BootstrapOptions& options) {
  std::vector<double> reps;
  if (options.unit == ResampleUnit::kPairValue) {
    const double ws = within.Mean() * within.values.size();
    const double as = across.Mean() * across.values.size();
    const double wn = within.values.size();
    const double an = across.values.size();
    for (double v : within.values) {
      if (wn > 1) reps.push_back(as / an - (ws - v) / (wn - 1));
    }
    for (double v : across.values) {
      if (an > 1) reps.push_back((as - v) / (an - 1) - ws / wn);
    }
    return reps;
  }
  TreeLevelModel model(within, across);
  std::vector<std::vector<int>> identity(model.group_count());
  for (std::size_t s = 0; s < model.group_count(); ++s) {
    for (int i = 0; i < model.size(s); ++i) identity[s].push_back(i);
  }
  for (std::size_t s = 0; s < model.group_count(); ++s) {
    for (int i = 0; i < model.size(s); ++i) {
      auto [w, a] = model.Means(identity, static_cast<int>(s), i);
      if (std::isnan(w) || std::isnan(a)) continue;
      reps.push_back(a - w);
    }
  }
  return reps;
}

ConfidenceInterval Interval(std::span<const double> sorted, double level,
                            double z0, double accel, bool bca) {
  const double alpha = (1.0 - level) / 2.0;
  double lo_q = alpha;
  double hi_q = 1.0 - alpha;
  if (bca) {
    auto adjust = [&](double q) {
      const double z = NormalQuantile(q);
      return NormalCdf(z0 + (z0 + z) / (1.0 - accel * (z0 + z)));
    };
    lo_q = adjust(lo_q);
    hi_q = adjust(hi_q);
  }
  return ConfidenceInterval{QuantileSorted(sorted, lo_q),
                            QuantileSorted(sorted, hi_q)};
}

}  // namespace

std::vector<double> BootstrapEffectSamples(const DiffDistribution& within,
                                           const DiffDistribution& across,
                                           const BootstrapOptions& options) {
  CheckInputs(within, across, options);
  const double within_obs = within.Mean();
  const double across_obs = across.Mean();
  std::vector<double> samples(options.n_resamples);

  if (options.unit == ResampleUnit::kPairValue) {
    const std::span<const double> w = within.values;
    const std::span<const double> a = across.values;
    ParallelFor(options.n_resamples, options.threads,
                [&](std::size_t begin, std::size_t end) {
                  for (std::size_t r = begin; r < end; ++r) {
                    StreamRng rng(DeriveSeed(options.seed, r));
                    double ws = 0.0;
                    for (std::size_t k = 0; k < w.size(); ++k) {
                      ws += w[UniformIndex(rng, w.size())];
                    }
                    double as = 0.0;
                    for (std::size_t k = 0; k < a.size(); ++k) {
                      as += a[UniformIndex(rng, a.size())];
                    }
                    samples[r] = as / static_cast<double>(a.size()) -
                                 ws / static_cast<double>(w.size());
                  }
                });
    return samples;
  }

  const TreeLevelModel model(within, across);
  ParallelFor(options.n_resamples, options.threads,
              [&](std::size_t begin, std::size_t end) {
                std::vector<std::vector<int>> draws(model.group_count());
                for (std::size_t s = 0; s < draws.size(); ++s) {
                  draws[s].resize(model.size(s));
                }
                for (std::size_t r = begin; r < end; ++r) {
                  StreamRng rng(DeriveSeed(options.seed, r));
                  for (std::size_t s = 0; s < draws.size(); ++s) {
                    for (int& idx : draws[s]) {
                      idx = static_cast<int>(UniformIndex(rng, model.size(s)));
                    }
                  }
                  auto [wm, am] = model.Means(draws);
                  samples[r] = Effect(wm, am, within_obs, across_obs);
                }
              });
  return samples;
}

EffectReport BootstrapEffect(const DiffDistribution& within,
                             const DiffDistribution& across,
                             const BootstrapOptions& options) {
  std::vector<double> samples = BootstrapEffectSamples(within, across, options);

  EffectReport report;
  report.characteristic = within.characteristic;
  report.mean_within = within.Mean();
  report.mean_across = across.Mean();
  report.n_resamples = options.n_resamples;
  report.n_within = within.values.size();
  report.n_across = across.values.size();

  double sum = 0.0;
  for (double e : samples) sum += e;
  report.mean_effect = sum / static_cast<double>(samples.size());

  std::vector<double> sorted = std::move(samples);
  std::sort(sorted.begin(), sorted.end());

  double z0 = 0.0;
  double accel = 0.0;
  bool bca = options.method == IntervalMethod::kBca &&
             sorted.front() < sorted.back();
  if (bca) {
    // Signed within-group pairs average to zero over tree orderings, and
    // resampled trees come in random order.
    const double within_sym = options.unit == ResampleUnit::kTree &&
                                      IsAntisymmetric(within.characteristic)
                                  ? 0.0
                                  : report.mean_within;
    const double observed = report.mean_across - within_sym;
    const auto less = std::lower_bound(sorted.begin(), sorted.end(), observed) -
                      sorted.begin();
    const auto upto = std::upper_bound(sorted.begin(), sorted.end(), observed) -
                      sorted.begin();
    const double n = static_cast<double>(sorted.size());
    const double frac = std::clamp((less + 0.5 * (upto - less)) / n, 0.5 / n,
                                   1.0 - 0.5 / n);
    z0 = NormalQuantile(frac);
    const std::vector<double> reps = Jackknife(within, across, options);
    if (reps.size() >= 2) {
      double mean = 0.0;
      for (double v : reps) mean += v;
      mean /= static_cast<double>(reps.size());
      double s2 = 0.0, s3 = 0.0;
      for (double v : reps) {
        const double d = mean - v;
        s2 += d * d;
        s3 += d * d * d;
      }
      if (s2 > 0.0) accel = s3 / (6.0 * std::pow(s2, 1.5));
    }
  }
  report.ci95 = Interval(sorted, 0.95, z0, accel, bca);
  report.ci99 = Interval(sorted, 0.99, z0, accel, bca);
  report.significant95 = IsSignificant(report.ci95);
  report.significant99 = IsSignificant(report.ci99);
  return report;
}

}  // namespace sockaudit
