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

#include "sockaudit/orchestrator.h"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <memory>
#include <thread>
#include <unordered_set>

namespace sockaudit {

namespace {

constexpr std::uint64_t kScheduleStream = 0x5C4ED;
constexpr std::uint64_t kSessionStream = 0x5E5510;

}  // namespace

void AuditConfig::Validate() const {
  const std::string where = label.empty() ? "config" : "config '" + label + "'";
  if (training_set.empty()) {
    throw ValidationError(where + ".training_set must not be empty");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : training_set) {
    if (!seen.insert(id).second) {
      throw ValidationError(where + ".training_set repeats '" + id + "'");
    }
  }
  if (seed_video.empty()) throw ValidationError(where + ".seed_video is empty");
  if (!(watch_fraction > 0.0 && watch_fraction <= 1.0)) {
    throw ValidationError(where + ".watch_fraction must be in (0, 1]");
  }
  if (n_paths < 2) throw ValidationError(where + ".n_paths must be >= 2");
  if (depth < 0) throw ValidationError(where + ".depth must be >= 0");
  if (n_rec < n_paths) {
    throw ValidationError(where + ".n_rec must be >= n_paths");
  }
  if (!std::isfinite(zipf_s) || zipf_s < 0.0) {
    throw ValidationError(where + ".zipf_s must be finite and >= 0");
  }
}

int DrawZipfColumn(int n_rec, double zipf_s, std::span<const int> taken,
                   StreamRng& rng) {
  std::vector<int> columns;
  std::vector<double> cdf;
  double acc = 0.0;
  for (int col = 1; col <= n_rec - 2; ++col) {
    if (std::find(taken.begin(), taken.end(), col) != taken.end()) continue;
    acc += std::pow(static_cast<double>(col + 1), -zipf_s);
    columns.push_back(col);
    cdf.push_back(acc);
  }
  if (columns.empty()) {
    throw ValidationError("no middle column left to draw");
  }
  const double u = UniformDouble(rng) * acc;
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const std::size_t k = std::min<std::size_t>(it - cdf.begin(), columns.size() - 1);
  return columns[k];
}

PathSchedule SelectPaths(int n_rec, int n_paths, double zipf_s, StreamRng& rng) {
  if (n_paths < 2) throw ValidationError("n_paths must be >= 2");
  if (n_rec < 2 || n_paths - 2 > n_rec - 2) {
    throw ValidationError("n_rec=" + std::to_string(n_rec) +
                          " cannot supply " + std::to_string(n_paths - 2) +
                          " distinct middle columns");
  }
  std::vector<int> middle;
  for (int k = 0; k < n_paths - 2; ++k) {
    middle.push_back(DrawZipfColumn(n_rec, zipf_s, middle, rng));
  }
  std::sort(middle.begin(), middle.end());
  PathSchedule schedule;
  schedule.columns.push_back(0);
  schedule.columns.insert(schedule.columns.end(), middle.begin(), middle.end());
  schedule.columns.push_back(n_rec - 1);
  return schedule;
}

std::int64_t WatchSeconds(double fraction, std::int64_t duration_s) {
  // Guard against 0.1 * 600 landing a hair above 60.
  const double raw = fraction * static_cast<double>(duration_s);
  return static_cast<std::int64_t>(std::ceil(raw - 1e-9));
}

void TrainPuppet(const SimWorld& world, PuppetSession& session,
                 std::span<const std::string> training_set,
                 double watch_fraction) {
  for (const auto& id : training_set) {
    const std::size_t idx = world.RequireIndex(id);
    session.RegisterWatch(world, id,
                          WatchSeconds(watch_fraction, world.catalog()[idx].duration_s));
  }
}

PathCrawler::PathCrawler(const SimWorld& world, PuppetSession session,
                         std::string seed, TraverseOptions options)
    : world_(&world),
      session_(std::move(session)),
      seed_(std::move(seed)),
      options_(options),
      faults_(options.faults.begin(), options.faults.end()) {
  options_.faults = {};
  record_.column = options.column;
}

const Fault* PathCrawler::FaultAt(int depth) const {
  for (const auto& f : faults_) {
    if (f.depth == depth) return &f;
  }
  return nullptr;
}

void PathCrawler::Step(int depth, std::int64_t epoch) {
  if (failed()) return;
  const Fault* fault = FaultAt(depth);
  if (fault != nullptr && fault->kind == FaultKind::kCrawlFailure) {
    record_.failure = "crawl failure at depth " + std::to_string(depth);
    return;
  }
  try {
    bool clamped = false;
    std::string watched;
    if (depth == 0) {
      watched = seed_;
    } else {
      const auto& list = last_recommendations_;
      std::size_t col = static_cast<std::size_t>(options_.column);
      if (col >= list.size()) {
        clamped = true;
        col = list.size() - 1;
      }
      watched = list[col].video_id;
    }
    const std::size_t idx = world_->RequireIndex(watched);
    session_.RegisterWatch(
        *world_, watched,
        WatchSeconds(options_.watch_fraction, world_->catalog()[idx].duration_s));
    std::vector<VideoMeta> recs =
        Recommend(*world_, session_, watched,
                  static_cast<std::size_t>(options_.n_rec),
                  RecommendContext{depth, epoch, options_.interaction});
    if (fault != nullptr && fault->kind == FaultKind::kEmptyList) recs.clear();
    if (fault != nullptr && fault->kind == FaultKind::kShortList &&
        static_cast<int>(recs.size()) > fault->list_length) {
      recs.resize(static_cast<std::size_t>(std::max(0, fault->list_length)));
    }
    if (recs.empty()) {
      record_.failure =
          "empty recommendation list at depth " + std::to_string(depth);
      return;
    }
    current_ = watched;
    last_recommendations_ = recs;
    record_.observations.push_back(
        Observation{depth, std::move(watched), std::move(recs), clamped, epoch});
  } catch (const std::exception& e) {
    record_.failure = "crawler error at depth " + std::to_string(depth) +
                      ": " + e.what();
  }
}

PathRecord TraversePath(const SimWorld& world, PuppetSession& session,
                        std::string_view seed, const TraverseOptions& options) {
  PathCrawler crawler(world, session, std::string(seed), options);
  for (int d = 0; d <= options.depth; ++d) crawler.Step(d, d);
  session = crawler.session();
  return crawler.TakeRecord();
}

SimWorld WorldSpec::Generate() const {
  return SimWorld::Generate(bias, seed, catalog_size, n_channels, options);
}

void ExperimentSpec::Validate() const {
  config_a.Validate();
  config_b.Validate();
  if (n_trees_per_group < 2) {
    throw ValidationError("n_trees_per_group must be >= 2");
  }
  if (config_a.n_paths != config_b.n_paths || config_a.depth != config_b.depth ||
      config_a.n_rec != config_b.n_rec || config_a.zipf_s != config_b.zipf_s) {
    throw ValidationError(
        "config_a and config_b must share n_paths, depth, n_rec and zipf_s "
        "(trees are compared node position by node position)");
  }
  if (resamples < 1000) throw ValidationError("resamples must be >= 1000");
  for (const auto& f : faults) {
    if (f.group < 0 || f.group > 1 || f.tree < 0 ||
        f.tree >= n_trees_per_group || f.path < 0 ||
        f.path >= config_a.n_paths || f.depth < 0 || f.depth > config_a.depth) {
      throw ValidationError("fault targets a crawler outside the experiment");
    }
  }
}

std::string GroupTag(const ExperimentSpec& spec, int group) {
  const AuditConfig& config = group == 0 ? spec.config_a : spec.config_b;
  if (!config.label.empty()) return config.label;
  return group == 0 ? "a" : "b";
}

ExperimentResult RunExperiment(const ExperimentSpec& spec,
                               Scheduler scheduler) {
  const SimWorld world = spec.world.Generate();
  return RunExperiment(spec, world, scheduler);
}

ExperimentResult RunExperiment(const ExperimentSpec& spec, const SimWorld& world,
                               Scheduler scheduler) {
  spec.Validate();
  const AuditConfig* configs[2] = {&spec.config_a, &spec.config_b};
  for (const AuditConfig* config : configs) {
    world.RequireIndex(config->seed_video);
    for (const auto& id : config->training_set) world.RequireIndex(id);
  }
  const int n_trees = spec.n_trees_per_group;
  const int n_paths = spec.config_a.n_paths;
  const int depth = spec.config_a.depth;
  const int n_rec = spec.config_a.n_rec;

  ExperimentResult result;
  {
    StreamRng rng(DeriveSeed(spec.rng_seed, kScheduleStream));
    const PathSchedule shared =
        SelectPaths(n_rec, n_paths, spec.config_a.zipf_s, rng);
    for (int t = 0; t < n_trees; ++t) {
      if (!spec.resample_paths_per_tree) {
        result.schedules.push_back(shared);
        continue;
      }
      StreamRng tree_rng(DeriveSeed(spec.rng_seed, kScheduleStream + 1 + t));
      result.schedules.push_back(
          SelectPaths(n_rec, n_paths, spec.config_a.zipf_s, tree_rng));
    }
  }

  const std::uint64_t session_seed =
      DeriveSeed(DeriveSeed(world.seed(), spec.rng_seed), kSessionStream);
  std::vector<std::unique_ptr<PathCrawler>> crawlers;
  crawlers.reserve(static_cast<std::size_t>(2 * n_trees * n_paths));
  for (int g = 0; g < 2; ++g) {
    const AuditConfig& config = *configs[g];
    for (int t = 0; t < n_trees; ++t) {
      for (int p = 0; p < n_paths; ++p) {
        const std::string puppet_id = std::string(g == 0 ? "A/" : "B/") +
                                      GroupTag(spec, g) + "/t" +
                                      std::to_string(t) + "/p" +
                                      std::to_string(p);
        PuppetSession session(config.account_mode, session_seed, puppet_id);
        TrainPuppet(world, session, config.training_set, config.watch_fraction);
        if (config.account_mode == AccountMode::kClear) session.ClearHistory();
        TraverseOptions options;
        options.column = result.schedules[t].columns[p];
        options.depth = depth;
        options.n_rec = n_rec;
        options.watch_fraction = config.watch_fraction;
        options.interaction = config.interaction;
        std::vector<Fault> mine;
        for (const auto& f : spec.faults) {
          if (f.group == g && f.tree == t && f.path == p) mine.push_back(f);
        }
        options.faults = mine;
        crawlers.push_back(std::make_unique<PathCrawler>(
            world, std::move(session), config.seed_video, options));
      }
    }
  }

  std::atomic<std::int64_t> epoch{0};
  if (scheduler == Scheduler::kSingleThreaded) {
    for (int d = 0; d <= depth; ++d) {
      for (auto& c : crawlers) c->Step(d, epoch.load());
      epoch.fetch_add(1);
    }
  } else {
    auto advance = [&epoch]() noexcept { epoch.fetch_add(1); };
    std::barrier sync(static_cast<std::ptrdiff_t>(crawlers.size()), advance);
    std::vector<std::jthread> threads;
    threads.reserve(crawlers.size());
    for (auto& c : crawlers) {
      threads.emplace_back([&sync, &epoch, depth, crawler = c.get()] {
        for (int d = 0; d <= depth; ++d) {
          crawler->Step(d, epoch.load());
          sync.arrive_and_wait();
        }
      });
    }
  }
  result.final_epoch = epoch.load();

  std::size_t k = 0;
  for (int g = 0; g < 2; ++g) {
    auto& out = g == 0 ? result.trees_a : result.trees_b;
    for (int t = 0; t < n_trees; ++t) {
      std::vector<PathRecord> records;
      for (int p = 0; p < n_paths; ++p) records.push_back(crawlers[k++]->TakeRecord());
      out.push_back(BuildTree(configs[g]->seed_video, records, GroupTag(spec, g),
                              TreeShape{depth, n_rec}));
    }
  }
  return result;
}

}  // namespace sockaudit
