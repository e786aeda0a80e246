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

#ifndef SOCKAUDIT_SIM_H_
#define SOCKAUDIT_SIM_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sockaudit/common.h"
#include "sockaudit/rng.h"
#include "sockaudit/tree.h"

namespace sockaudit {

// Ground truth injected into the synthetic platform's ranking.
struct BiasParams {
  double popularity_weight = 1.0;
  // Weight of similarity to the video being watched right now.
  double recency_weight = 2.0;
  // Weight of similarity to the mean topic of the (threshold-passing)
  // watch history.
  double history_weight = 0.5;
  // Popularity term is multiplied by depth_decay^depth.
  double depth_decay = 1.0;
  std::map<AccountMode, double> account_mode_noise = {
      {AccountMode::kFull, 0.5},
      {AccountMode::kCookies, 0.5},
      {AccountMode::kClear, 0.5}};
  // Server-side penalty on the popularity weight for `get` interactions.
  double get_popularity_penalty = 0.0;
  double views_log_mu = 11.5;
  double views_log_sigma = 1.5;
  // Per-epoch log-view drift scale; 0 freezes the catalog.
  double epoch_view_drift = 0.0;

  double NoiseFor(AccountMode mode) const;
  friend bool operator==(const BiasParams&, const BiasParams&) = default;
  // Throws ValidationError on non-finite or out-of-range values.
  void Validate() const;
};

// Catalog shape knobs that are not ranking biases.
struct WorldOptions {
  int topic_dim = 16;
  std::int64_t min_duration_s = 120;
  std::int64_t max_duration_s = 1200;
  double channel_zipf_s = 1.0;
  // Correlation between a video's log views and its position along one
  // fixed "mainstream" topic direction.
  double popularity_topic_correlation = 0.5;
  int vocabulary_size = 800;
  int title_words = 6;
  int description_words = 24;
  // Sharpness of topic -> word sampling.
  double word_topic_sharpness = 10.0;
  std::int64_t view_threshold_s = 30;
  int n_rec = kDefaultRecommendations;

  void Validate() const;
  friend bool operator==(const WorldOptions&, const WorldOptions&) = default;
};

// Synthetic platform state. Immutable after generation and safe to share
// between crawler threads.
class SimWorld {
 public:
  // Throws ValidationError when catalog_size < 10 * options.n_rec or
  // n_channels < 2, or on invalid params/options.
  static SimWorld Generate(const BiasParams& params, std::uint64_t seed,
                           std::size_t catalog_size, std::size_t n_channels,
                           const WorldOptions& options = {});

  const std::vector<VideoMeta>& catalog() const { return catalog_; }
  const std::vector<std::string>& channels() const { return channels_; }
  const BiasParams& params() const { return params_; }
  const WorldOptions& options() const { return options_; }
  std::uint64_t seed() const { return seed_; }
  std::int64_t view_threshold_s() const { return options_.view_threshold_s; }
  std::size_t size() const { return catalog_.size(); }

  std::optional<std::size_t> IndexOf(std::string_view video_id) const;
  // Throws ValidationError for unknown ids.
  std::size_t RequireIndex(std::string_view video_id) const;

  // Columns are unit topic vectors, one per catalog entry.
  const Matrix& topics() const { return topics_; }

  std::int64_t ViewsAt(std::size_t index, std::int64_t epoch) const;
  // Standard score of log views at `epoch`, normalized with the catalog
  // statistics fixed at generation time.
  Vector PopularityScores(std::int64_t epoch) const;

  // Copy with one video's view count replaced; normalization unchanged.
  SimWorld WithViews(std::size_t index, std::int64_t views) const;

  // Indices sorted by views, descending (ties by id).
  std::vector<std::size_t> ByViews() const;

  // Indices by topic cosine to `anchor`, descending; the anchor comes first.
  std::vector<std::size_t> ByTopicSimilarity(std::size_t anchor) const;

 private:
  SimWorld() = default;

  std::vector<VideoMeta> catalog_;
  std::vector<std::string> channels_;
  std::unordered_map<std::string, std::size_t> index_;
  BiasParams params_;
  WorldOptions options_;
  std::uint64_t seed_ = 0;
  Matrix topics_;
  Vector log_views_;
  Vector drift_direction_;
  double log_view_mean_ = 0.0;
  double log_view_sd_ = 1.0;
};

struct WatchEvent {
  std::string video_id;
  std::int64_t watch_seconds = 0;
  bool influences = false;

  friend bool operator==(const WatchEvent&, const WatchEvent&) = default;
};

// One sock-puppet's state on the platform. Owned by a single crawler at a
// time; movable between threads.
class PuppetSession {
 public:
  PuppetSession(AccountMode mode, std::uint64_t stream_seed,
                std::string_view puppet_id);

  AccountMode mode() const { return mode_; }
  const std::string& puppet_id() const { return puppet_id_; }
  const std::vector<WatchEvent>& history() const { return history_; }
  std::size_t influence_count() const { return influence_count_; }
  // Sum of topic vectors of influencing watches (empty before the first).
  const Vector& influence_sum() const { return influence_sum_; }
  StreamRng& rng() { return rng_; }

  // Appends to the history. The watch shapes future recommendations iff
  // watch_seconds >= the world's view threshold. Throws ValidationError on
  // unknown ids or negative durations.
  void RegisterWatch(const SimWorld& world, std::string_view video_id,
                     std::int64_t watch_seconds);

  // Empties history and influence. Cookie sessions have no server-side
  // history to clear: throws ValidationError.
  void ClearHistory();

 private:
  AccountMode mode_;
  std::string puppet_id_;
  StreamRng rng_;
  std::vector<WatchEvent> history_;
  Vector influence_sum_;
  std::size_t influence_count_ = 0;
};

struct RecommendContext {
  int depth = 0;
  std::int64_t epoch = 0;
  InteractionMode interaction = InteractionMode::kClick;
};

// Top-n candidates (current excluded) by
//   w_pop * decay^depth * z(log views) + w_rec * cos(c, current)
//   + w_hist * cos(c, history mean) + noise(mode),
// ties broken by ascending video id. Returned entries carry the views seen
// at ctx.epoch and no topic vector.
std::vector<VideoMeta> Recommend(const SimWorld& world, PuppetSession& session,
                                 std::string_view current, std::size_t n,
                                 const RecommendContext& ctx = {});

// The score vector Recommend ranks, exposed for oracles and diagnostics.
// Consumes session noise exactly like Recommend.
Vector RecommendationScores(const SimWorld& world, PuppetSession& session,
                            std::size_t current_index,
                            const RecommendContext& ctx);

}  // namespace sockaudit

#endif  // SOCKAUDIT_SIM_H_
