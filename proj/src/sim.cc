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

#include "sockaudit/sim.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "sockaudit/text.h"

namespace sockaudit {

namespace {

enum StreamTag : std::uint64_t {
  kChannelStream = 1,
  kVocabularyStream,
  kVideoStream,
  kDriftStream,
};

std::string FormatId(char prefix, std::size_t index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*zu", prefix, width, index);
  return buf;
}

Vector RandomUnit(StreamRng& rng, int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = StandardNormal(rng);
  const double n = v.norm();
  if (n == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / n;
}

std::size_t SampleCdf(const std::vector<double>& cdf, StreamRng& rng) {
  const double u = UniformDouble(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
}

// Pronounceable CV-syllable words ending in a vowel, so no suffix rule of
// the lemmatizer touches them.
std::vector<std::string> MakeVocabulary(int size, StreamRng& rng) {
  static constexpr std::string_view kConsonants = "bdfgklmnprtvz";
  static constexpr std::string_view kVowels = "aeiou";
  const Lexicon& lexicon = Lexicon::Bundled();
  std::unordered_set<std::string> seen;
  std::vector<std::string> words;
  while (static_cast<int>(words.size()) < size) {
    const int syllables = 2 + static_cast<int>(UniformIndex(rng, 2));
    std::string w;
    for (int s = 0; s < syllables; ++s) {
      w.push_back(kConsonants[UniformIndex(rng, kConsonants.size())]);
      w.push_back(kVowels[UniformIndex(rng, kVowels.size())]);
    }
    if (lexicon.IsStopWord(w) || lexicon.Lemmatize(w) != w) continue;
    if (seen.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

}  // namespace

double BiasParams::NoiseFor(AccountMode mode) const {
  auto it = account_mode_noise.find(mode);
  return it == account_mode_noise.end() ? 0.0 : it->second;
}

void BiasParams::Validate() const {
  auto finite_nonneg = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string("bias.") + name +
                            " must be finite and >= 0");
    }
  };
  finite_nonneg(popularity_weight, "popularity_weight");
  finite_nonneg(recency_weight, "recency_weight");
  finite_nonneg(history_weight, "history_weight");
  finite_nonneg(get_popularity_penalty, "get_popularity_penalty");
  finite_nonneg(epoch_view_drift, "epoch_view_drift");
  if (!std::isfinite(depth_decay) || depth_decay < 0.0 || depth_decay > 1.0) {
    throw ValidationError("bias.depth_decay must be in [0, 1]");
  }
  for (const auto& [mode, noise] : account_mode_noise) {
    if (!std::isfinite(noise) || noise < 0.0) {
      throw ValidationError("bias.account_mode_noise." +
                            std::string(ToString(mode)) +
                            " must be finite and >= 0");
    }
  }
  if (!std::isfinite(views_log_mu)) {
    throw ValidationError("bias.views_lognormal mu must be finite");
  }
  if (!std::isfinite(views_log_sigma) || views_log_sigma <= 0.0) {
    throw ValidationError("bias.views_lognormal sigma must be > 0");
  }
}

void WorldOptions::Validate() const {
  if (topic_dim < 2) throw ValidationError("world.topic_dim must be >= 2");
  if (min_duration_s < 0 || max_duration_s < min_duration_s) {
    throw ValidationError("world.duration_s range is invalid");
  }
  if (!std::isfinite(channel_zipf_s) || channel_zipf_s < 0.0) {
    throw ValidationError("world.channel_zipf_s must be >= 0");
  }
  if (!(popularity_topic_correlation >= -1.0 &&
        popularity_topic_correlation <= 1.0)) {
    throw ValidationError("world.popularity_topic_correlation must be in [-1, 1]");
  }
  if (vocabulary_size < 10) {
    throw ValidationError("world.vocabulary_size must be >= 10");
  }
  if (title_words < 0 || description_words < 0) {
    throw ValidationError("world word counts must be >= 0");
  }
  if (view_threshold_s < 0) {
    throw ValidationError("world.view_threshold_s must be >= 0");
  }
  if (n_rec < 1) throw ValidationError("n_rec must be >= 1");
}

SimWorld SimWorld::Generate(const BiasParams& params, std::uint64_t seed,
                            std::size_t catalog_size, std::size_t n_channels,
                            const WorldOptions& options) {
  params.Validate();
  options.Validate();
  if (catalog_size < 10 * static_cast<std::size_t>(options.n_rec)) {
    throw ValidationError("catalog_size must be >= 10 * n_rec (" +
                          std::to_string(10 * options.n_rec) + ")");
  }
  if (n_channels < 2) throw ValidationError("n_channels must be >= 2");

  SimWorld world;
  world.params_ = params;
  world.options_ = options;
  world.seed_ = seed;
  const int dim = options.topic_dim;

  std::vector<double> channel_cdf;
  for (std::size_t k = 0; k < n_channels; ++k) {
    world.channels_.push_back(FormatId('c', k, 4));
    const double w = std::pow(static_cast<double>(k + 1), -options.channel_zipf_s);
    channel_cdf.push_back((channel_cdf.empty() ? 0.0 : channel_cdf.back()) + w);
  }

  StreamRng vocab_rng(DeriveSeed(seed, kVocabularyStream));
  const std::vector<std::string> vocabulary =
      MakeVocabulary(options.vocabulary_size, vocab_rng);
  Matrix word_topics(dim, options.vocabulary_size);
  for (int w = 0; w < options.vocabulary_size; ++w) {
    word_topics.col(w) = RandomUnit(vocab_rng, dim);
  }

  StreamRng channel_rng(DeriveSeed(seed, kChannelStream));
  StreamRng video_rng(DeriveSeed(seed, kVideoStream));
  StreamRng drift_rng(DeriveSeed(seed, kDriftStream));
  const double rho = options.popularity_topic_correlation;
  const double idio = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const double axis_scale = std::sqrt(static_cast<double>(dim));

  world.topics_.resize(dim, static_cast<Eigen::Index>(catalog_size));
  world.log_views_.resize(static_cast<Eigen::Index>(catalog_size));
  world.drift_direction_.resize(static_cast<Eigen::Index>(catalog_size));
  world.catalog_.reserve(catalog_size);

  std::vector<double> word_cdf(options.vocabulary_size);
  auto sample_words = [&](const Vector& logits, int count) {
    std::string text;
    double acc = 0.0;
    const double top = logits.maxCoeff();
    for (int w = 0; w < logits.size(); ++w) {
      acc += std::exp(logits[w] - top);
      word_cdf[w] = acc;
    }
    for (int k = 0; k < count; ++k) {
      if (!text.empty()) text.push_back(' ');
      text += vocabulary[SampleCdf(word_cdf, video_rng)];
    }
    return text;
  };

  for (std::size_t i = 0; i < catalog_size; ++i) {
    VideoMeta video;
    video.video_id = FormatId('v', i, 5);
    video.channel_id = world.channels_[SampleCdf(channel_cdf, channel_rng)];
    const Vector topic = RandomUnit(video_rng, dim);
    const double latent =
        rho * axis_scale * topic[0] + idio * StandardNormal(video_rng);
    const double views =
        std::floor(std::exp(params.views_log_mu + params.views_log_sigma * latent));
    video.views = static_cast<std::int64_t>(std::min(views, 9.0e15));
    video.duration_s =
        options.min_duration_s +
        static_cast<std::int64_t>(UniformIndex(
            video_rng,
            static_cast<std::size_t>(options.max_duration_s -
                                     options.min_duration_s + 1)));
    const Vector logits =
        options.word_topic_sharpness * (word_topics.transpose() * topic);
    video.title = sample_words(logits, options.title_words);
    video.description = "official video " +
                        sample_words(logits, options.description_words) +
                        " the full story and more https://example.com/watch?v=" +
                        video.video_id + " subscribe";
    world.topics_.col(static_cast<Eigen::Index>(i)) = topic;
    world.log_views_[static_cast<Eigen::Index>(i)] =
        std::log1p(static_cast<double>(video.views));
    world.drift_direction_[static_cast<Eigen::Index>(i)] =
        StandardNormal(drift_rng);
    video.topic = topic;
    world.index_.emplace(video.video_id, i);
    world.catalog_.push_back(std::move(video));
  }

  world.log_view_mean_ = world.log_views_.mean();
  const double var =
      (world.log_views_.array() - world.log_view_mean_).square().sum() /
      static_cast<double>(catalog_size);
  world.log_view_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
  return world;
}

std::optional<std::size_t> SimWorld::IndexOf(std::string_view video_id) const {
  auto it = index_.find(std::string(video_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t SimWorld::RequireIndex(std::string_view video_id) const {
  auto idx = IndexOf(video_id);
  if (!idx) {
    throw ValidationError("unknown video id '" + std::string(video_id) + "'");
  }
  return *idx;
}

std::int64_t SimWorld::ViewsAt(std::size_t index, std::int64_t epoch) const {
  const std::int64_t base = catalog_.at(index).views;
  if (params_.epoch_view_drift == 0.0 || epoch == 0) return base;
  const double shift = params_.epoch_view_drift * static_cast<double>(epoch) *
                       drift_direction_[static_cast<Eigen::Index>(index)];
  return static_cast<std::int64_t>(
      std::floor(std::exp(log_views_[static_cast<Eigen::Index>(index)] + shift)));
}

Vector SimWorld::PopularityScores(std::int64_t epoch) const {
  Vector lv = log_views_;
  if (params_.epoch_view_drift != 0.0 && epoch != 0) {
    lv += (params_.epoch_view_drift * static_cast<double>(epoch)) *
          drift_direction_;
  }
  return (lv.array() - log_view_mean_) / log_view_sd_;
}

SimWorld SimWorld::WithViews(std::size_t index, std::int64_t views) const {
  if (views < 0) throw ValidationError("views must be >= 0");
  SimWorld copy = *this;
  copy.catalog_.at(index).views = views;
  copy.log_views_[static_cast<Eigen::Index>(index)] =
      std::log1p(static_cast<double>(views));
  return copy;
}

std::vector<std::size_t> SimWorld::ByViews() const {
  std::vector<std::size_t> order(catalog_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return catalog_[a].views > catalog_[b].views;
  });
  return order;
}

std::vector<std::size_t> SimWorld::ByTopicSimilarity(std::size_t anchor) const {
  if (anchor >= catalog_.size()) throw ValidationError("anchor index out of range");
  const Vector sims =
      topics_.transpose() * topics_.col(static_cast<Eigen::Index>(anchor));
  std::vector<std::size_t> order(catalog_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (a == anchor || b == anchor) return a == anchor && b != anchor;
    return sims[static_cast<Eigen::Index>(a)] > sims[static_cast<Eigen::Index>(b)];
  });
  return order;
}

PuppetSession::PuppetSession(AccountMode mode, std::uint64_t stream_seed,
                             std::string_view puppet_id)
    : mode_(mode),
      puppet_id_(puppet_id),
      rng_(DeriveSeed(stream_seed, HashString(puppet_id))) {}

void PuppetSession::RegisterWatch(const SimWorld& world,
                                  std::string_view video_id,
                                  std::int64_t watch_seconds) {
  if (watch_seconds < 0) throw ValidationError("watch_seconds must be >= 0");
  const std::size_t idx = world.RequireIndex(video_id);
  const bool influences = watch_seconds >= world.view_threshold_s();
  history_.push_back(WatchEvent{std::string(video_id), watch_seconds, influences});
  if (influences) {
    const auto topic = world.topics().col(static_cast<Eigen::Index>(idx));
    if (influence_sum_.size() != topic.size()) {
      influence_sum_ = Vector::Zero(topic.size());
    }
    influence_sum_ += topic;
    ++influence_count_;
  }
}

void PuppetSession::ClearHistory() {
  if (mode_ == AccountMode::kCookies) {
    throw ValidationError(
        "cookie-based sessions have no server-side history to clear");
  }
  history_.clear();
  influence_sum_.resize(0);
  influence_count_ = 0;
}

Vector RecommendationScores(const SimWorld& world, PuppetSession& session,
                            std::size_t current_index,
                            const RecommendContext& ctx) {
  const BiasParams& p = world.params();
  double pop_weight = p.popularity_weight;
  if (ctx.interaction == InteractionMode::kGet) {
    pop_weight = std::max(0.0, pop_weight - p.get_popularity_penalty);
  }
  pop_weight *= std::pow(p.depth_decay, ctx.depth);

  Vector scores = pop_weight * world.PopularityScores(ctx.epoch);
  const Matrix& topics = world.topics();
  if (p.recency_weight != 0.0) {
    scores.noalias() += p.recency_weight *
                        (topics.transpose() *
                         topics.col(static_cast<Eigen::Index>(current_index)));
  }
  if (p.history_weight != 0.0 && session.influence_count() > 0) {
    const Vector& sum = session.influence_sum();
    const double norm = sum.norm();
    if (norm > 0.0) {
      scores.noalias() += (p.history_weight / norm) * (topics.transpose() * sum);
    }
  }
  const double noise = p.NoiseFor(session.mode());
  if (noise > 0.0) {
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
      scores[i] += noise * StandardNormal(session.rng());
    }
  }
  return scores;
}

std::vector<VideoMeta> Recommend(const SimWorld& world, PuppetSession& session,
                                 std::string_view current, std::size_t n,
                                 const RecommendContext& ctx) {
  const std::size_t cur = world.RequireIndex(current);
  if (n > world.size() - 1) {
    throw ValidationError("cannot recommend " + std::to_string(n) +
                          " videos from a catalog of " +
                          std::to_string(world.size()));
  }
  const Vector scores = RecommendationScores(world, session, cur, ctx);
  std::vector<std::size_t> order;
  order.reserve(world.size() - 1);
  for (std::size_t i = 0; i < world.size(); ++i) {
    if (i != cur) order.push_back(i);
  }
  // Ids are zero-padded, so index order is id order.
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = scores[static_cast<Eigen::Index>(a)];
    const double sb = scores[static_cast<Eigen::Index>(b)];
    if (sa != sb) return sa > sb;
    return world.catalog()[a].video_id < world.catalog()[b].video_id;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                    order.end(), better);
  std::vector<VideoMeta> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    VideoMeta rec = world.catalog()[order[k]];
    rec.topic.reset();
    rec.views = world.ViewsAt(order[k], ctx.epoch);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace sockaudit
