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

#include "sockaudit/config.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace sockaudit {

using nlohmann::json;

namespace {

// A JSON object read with a dotted path for error messages. Keys that are
// never read are reported by Finish() in strict mode.
class Fields {
 public:
  Fields(const json& j, std::string path, bool strict)
      : j_(j), path_(std::move(path)), strict_(strict) {
    if (!j_.is_object()) Fail("", "expected an object");
  }

  bool Has(const char* key) const { return j_.contains(key); }

  template <typename T>
  T Get(const char* key, T fallback) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return fallback;
    return Convert<T>(*it, key);
  }

  template <typename T>
  T Require(const char* key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) Fail(key, "required field is missing");
    return Convert<T>(*it, key);
  }

  const json& Raw(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  Fields Child(const char* key) {
    used_.insert(key);
    return Fields(j_.at(key), Path(key), strict_);
  }

  std::string Path(std::string_view key) const {
    if (key.empty()) return path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  [[noreturn]] void Fail(std::string_view key, const std::string& what) const {
    const std::string where = Path(key);
    throw ValidationError((where.empty() ? std::string("spec") : where) + ": " +
                          what);
  }

  void Finish() const {
    if (!strict_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) Fail(key, "unknown field");
    }
  }

 private:
  template <typename T>
  T Convert(const json& v, const char* key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) Fail(key, "expected a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) Fail(key, "expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned() &&
              v.get<std::int64_t>() < 0) {
            Fail(key, "must be >= 0");
          }
        }
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) Fail(key, "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) Fail(key, "expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      Fail(key, std::string("bad value: ") + e.what());
    }
  }

  const json& j_;
  std::string path_;
  bool strict_;
  std::set<std::string> used_;
};

std::string ResolveOne(Fields& parent, const char* key, const SimWorld& world);

std::vector<std::size_t> ResolveOrder(const SimWorld& world, Fields& sel,
                                      const std::string& kind,
                                      const std::string& stream_name) {
  std::vector<std::size_t> order;
  if (kind == "most_viewed") {
    order = world.ByViews();
  } else if (kind == "least_viewed") {
    order = world.ByViews();
    std::reverse(order.begin(), order.end());
  } else if (kind == "random") {
    order.resize(world.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    StreamRng rng(DeriveSeed(world.seed(), HashString(stream_name)));
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      std::swap(order[i], order[i + UniformIndex(rng, order.size() - i)]);
    }
  } else if (kind == "nearest") {
    if (!sel.Has("anchor")) sel.Fail("anchor", "required field is missing");
    const std::string anchor = ResolveOne(sel, "anchor", world);
    order = world.ByTopicSimilarity(world.RequireIndex(anchor));
  } else {
    sel.Fail("select",
             "unknown selector '" + kind +
                 "' (expected most_viewed|least_viewed|random|nearest)");
  }
  return order;
}

// A single video: an id, or {"select": ..., "rank": r}.
std::string ResolveOne(Fields& parent, const char* key, const SimWorld& world) {
  const json& raw = parent.Raw(key);
  std::string id;
  if (raw.is_string()) {
    id = raw.get<std::string>();
  } else if (raw.is_object()) {
    Fields sel = parent.Child(key);
    const auto kind = sel.Require<std::string>("select");
    const auto rank = sel.Get<std::size_t>("rank", 0);
    const auto order = ResolveOrder(world, sel, kind, parent.Path(key));
    if (rank >= order.size()) sel.Fail("rank", "exceeds catalog size");
    id = world.catalog()[order[rank]].video_id;
    sel.Finish();
  } else {
    parent.Fail(key, "expected a video id or a selector object");
  }
  if (!world.IndexOf(id)) parent.Fail(key, "unknown video id '" + id + "'");
  return id;
}

std::vector<std::string> ParseTrainingSet(Fields& config, const SimWorld& world) {
  const json& raw = config.Raw("training_set");
  const std::string path = config.Path("training_set");
  std::vector<std::string> ids;
  if (raw.is_array()) {
    for (const json& v : raw) {
      if (!v.is_string()) config.Fail("training_set", "expected video id strings");
      ids.push_back(v.get<std::string>());
    }
  } else if (raw.is_object()) {
    Fields sel = config.Child("training_set");
    const auto kind = sel.Require<std::string>("select");
    const auto count = sel.Get<std::size_t>("count", 32);
    const auto offset = sel.Get<std::size_t>("offset", 0);
    const auto order = ResolveOrder(world, sel, kind, path);
    if (count == 0) sel.Fail("count", "must be >= 1");
    if (offset + count > order.size()) sel.Fail("count", "exceeds catalog size");
    for (std::size_t k = 0; k < count; ++k) {
      ids.push_back(world.catalog()[order[offset + k]].video_id);
    }
    sel.Finish();
  } else {
    config.Fail("training_set", "expected a list of video ids or a selector object");
  }
  for (const auto& id : ids) {
    if (!world.IndexOf(id)) config.Fail("training_set", "unknown video id '" + id + "'");
  }
  return ids;
}

AuditConfig ParseConfig(const json& base, const json& overrides,
                        const std::string& path, bool strict,
                        const SimWorld& world) {
  json merged = base.is_object() ? base : json::object();
  if (!overrides.is_object()) {
    throw ValidationError(path + ": expected an object");
  }
  for (const auto& [k, v] : overrides.items()) merged[k] = v;
  Fields f(merged, path, strict);
  AuditConfig c;
  c.label = f.Get<std::string>("label", "");
  if (!f.Has("training_set")) f.Fail("training_set", "required field is missing");
  c.training_set = ParseTrainingSet(f, world);
  if (!f.Has("seed_video")) f.Fail("seed_video", "required field is missing");
  c.seed_video = ResolveOne(f, "seed_video", world);
  try {
    c.account_mode = ParseAccountMode(f.Get<std::string>("account_mode", "full"));
  } catch (const ValidationError& e) {
    f.Fail("account_mode", e.what());
  }
  c.watch_fraction = f.Get<double>("watch_fraction", 1.0);
  if (!(c.watch_fraction > 0.0 && c.watch_fraction <= 1.0)) {
    f.Fail("watch_fraction", "must be in (0, 1]");
  }
  try {
    c.interaction =
        ParseInteractionMode(f.Get<std::string>("interaction_mode", "click"));
  } catch (const ValidationError& e) {
    f.Fail("interaction_mode", e.what());
  }
  c.n_paths = f.Get<int>("n_paths", 5);
  if (c.n_paths < 2) f.Fail("n_paths", "must be >= 2");
  c.depth = f.Get<int>("depth", 10);
  if (c.depth < 0) f.Fail("depth", "must be >= 0");
  c.n_rec = f.Get<int>("n_rec", kDefaultRecommendations);
  if (c.n_rec < c.n_paths) f.Fail("n_rec", "must be >= n_paths");
  c.zipf_s = f.Get<double>("zipf_s", 1.0);
  if (!std::isfinite(c.zipf_s) || c.zipf_s < 0.0) f.Fail("zipf_s", "must be >= 0");
  f.Finish();
  c.Validate();
  return c;
}

WorldSpec ParseWorld(Fields& w) {
  WorldSpec world;
  world.seed = w.Get<std::uint64_t>("seed", 1);
  world.catalog_size = w.Get<std::size_t>("catalog_size", 2000);
  world.n_channels = w.Get<std::size_t>("n_channels", 150);
  WorldOptions& o = world.options;
  o.topic_dim = w.Get<int>("topic_dim", o.topic_dim);
  if (w.Has("duration_s")) {
    const auto range = w.Get<std::vector<std::int64_t>>("duration_s", {});
    if (range.size() != 2) w.Fail("duration_s", "expected [min, max]");
    o.min_duration_s = range[0];
    o.max_duration_s = range[1];
  }
  o.channel_zipf_s = w.Get<double>("channel_zipf_s", o.channel_zipf_s);
  o.popularity_topic_correlation =
      w.Get<double>("popularity_topic_correlation", o.popularity_topic_correlation);
  o.vocabulary_size = w.Get<int>("vocabulary_size", o.vocabulary_size);
  o.title_words = w.Get<int>("title_words", o.title_words);
  o.description_words = w.Get<int>("description_words", o.description_words);
  o.word_topic_sharpness = w.Get<double>("word_topic_sharpness", o.word_topic_sharpness);
  o.view_threshold_s = w.Get<std::int64_t>("view_threshold_s", o.view_threshold_s);

  BiasParams& b = world.bias;
  if (w.Has("bias")) {
    Fields bf = w.Child("bias");
    b.popularity_weight = bf.Get<double>("popularity_weight", b.popularity_weight);
    b.recency_weight = bf.Get<double>("recency_weight", b.recency_weight);
    b.history_weight = bf.Get<double>("history_weight", b.history_weight);
    b.depth_decay = bf.Get<double>("depth_decay", b.depth_decay);
    b.get_popularity_penalty =
        bf.Get<double>("get_popularity_penalty", b.get_popularity_penalty);
    b.epoch_view_drift = bf.Get<double>("epoch_view_drift", b.epoch_view_drift);
    if (bf.Has("views_lognormal")) {
      const auto mu_sigma = bf.Get<std::vector<double>>("views_lognormal", {});
      if (mu_sigma.size() != 2) bf.Fail("views_lognormal", "expected [mu, sigma]");
      b.views_log_mu = mu_sigma[0];
      b.views_log_sigma = mu_sigma[1];
    }
    if (bf.Has("account_mode_noise")) {
      Fields nf = bf.Child("account_mode_noise");
      for (AccountMode mode :
           {AccountMode::kFull, AccountMode::kCookies, AccountMode::kClear}) {
        const std::string key(ToString(mode));
        b.account_mode_noise[mode] =
            nf.Get<double>(key.c_str(), b.NoiseFor(mode));
      }
      nf.Finish();
    }
    bf.Finish();
  }
  w.Finish();
  try {
    b.Validate();
    o.Validate();
  } catch (const ValidationError& e) {
    w.Fail("", e.what());
  }
  if (world.catalog_size < 10 * static_cast<std::size_t>(o.n_rec)) {
    w.Fail("catalog_size", "must be >= 10 * n_rec");
  }
  if (world.n_channels < 2) w.Fail("n_channels", "must be >= 2");
  return world;
}

std::vector<Fault> ParseFaults(const json& raw, bool strict, int n_trees) {
  std::vector<Fault> faults;
  if (!raw.is_array()) throw ValidationError("faults: expected a list");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Fields f(raw[i], "faults[" + std::to_string(i) + "]", strict);
    Fault fault;
    const auto group = f.Require<std::string>("group");
    if (group != "a" && group != "b") f.Fail("group", "expected \"a\" or \"b\"");
    fault.group = group == "a" ? 0 : 1;
    fault.tree = f.Require<int>("tree");
    if (fault.tree < 0 || fault.tree >= n_trees) f.Fail("tree", "out of range");
    fault.path = f.Require<int>("path");
    fault.depth = f.Require<int>("depth");
    const auto kind = f.Get<std::string>("kind", "crawl_failure");
    if (kind == "crawl_failure") {
      fault.kind = FaultKind::kCrawlFailure;
    } else if (kind == "empty_list") {
      fault.kind = FaultKind::kEmptyList;
    } else if (kind == "short_list") {
      fault.kind = FaultKind::kShortList;
    } else {
      f.Fail("kind", "expected crawl_failure|empty_list|short_list");
    }
    fault.list_length = f.Get<int>("list_length", 1);
    if (fault.list_length < 0) f.Fail("list_length", "must be >= 0");
    f.Finish();
    faults.push_back(fault);
  }
  return faults;
}

json ConfigToJson(const AuditConfig& c) {
  return json{{"label", c.label},
              {"training_set", c.training_set},
              {"seed_video", c.seed_video},
              {"account_mode", ToString(c.account_mode)},
              {"watch_fraction", c.watch_fraction},
              {"interaction_mode", ToString(c.interaction)},
              {"n_paths", c.n_paths},
              {"depth", c.depth},
              {"n_rec", c.n_rec},
              {"zipf_s", c.zipf_s}};
}

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kCrawlFailure:
      return "crawl_failure";
    case FaultKind::kEmptyList:
      return "empty_list";
    case FaultKind::kShortList:
      return "short_list";
  }
  return "?";
}

}  // namespace

ExperimentSpec ParseSpec(std::string_view document, bool strict) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
  }
  Fields root(doc, "", strict);
  const int version = root.Get<int>("schema_version", kSpecSchemaVersion);
  if (version != kSpecSchemaVersion) {
    root.Fail("schema_version", "unsupported version " + std::to_string(version));
  }
  ExperimentSpec spec;
  spec.name = root.Get<std::string>("name", "");
  spec.rng_seed = root.Get<std::uint64_t>("rng_seed", 0);
  spec.n_trees_per_group = root.Get<int>("n_trees_per_group", 8);
  if (spec.n_trees_per_group < 2) root.Fail("n_trees_per_group", "must be >= 2");
  spec.resamples = root.Get<std::size_t>("resamples", 1'000'000);
  if (spec.resamples < 1000) root.Fail("resamples", "must be >= 1000");
  spec.resample_paths_per_tree = root.Get<bool>("resample_paths_per_tree", false);
  if (root.Has("world")) {
    Fields w = root.Child("world");
    spec.world = ParseWorld(w);
  }
  const SimWorld world = spec.world.Generate();

  json defaults = json::object();
  if (root.Has("defaults")) {
    defaults = root.Raw("defaults");
    if (!defaults.is_object()) root.Fail("defaults", "expected an object");
  }
  if (!root.Has("config_a")) root.Fail("config_a", "required field is missing");
  if (!root.Has("config_b")) root.Fail("config_b", "required field is missing");
  spec.config_a = ParseConfig(defaults, root.Raw("config_a"), "config_a", strict, world);
  spec.config_b = ParseConfig(defaults, root.Raw("config_b"), "config_b", strict, world);
  if (root.Has("faults")) {
    spec.faults = ParseFaults(root.Raw("faults"), strict, spec.n_trees_per_group);
  }
  root.Finish();
  spec.Validate();
  return spec;
}

WorldSpec ParseWorldSpec(std::string_view document, bool strict) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("spec: expected an object");
  if (!doc.contains("world")) return WorldSpec{};
  Fields w(doc.at("world"), "world", strict);
  return ParseWorld(w);
}

ExperimentSpec LoadSpec(const std::filesystem::path& file, bool strict) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open spec file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseSpec(buffer.str(), strict);
}

json SpecToJson(const ExperimentSpec& spec) {
  const BiasParams& b = spec.world.bias;
  const WorldOptions& o = spec.world.options;
  json noise = json::object();
  for (const auto& [mode, value] : b.account_mode_noise) {
    noise[std::string(ToString(mode))] = value;
  }
  json world{
      {"seed", spec.world.seed},
      {"catalog_size", spec.world.catalog_size},
      {"n_channels", spec.world.n_channels},
      {"topic_dim", o.topic_dim},
      {"duration_s", {o.min_duration_s, o.max_duration_s}},
      {"channel_zipf_s", o.channel_zipf_s},
      {"popularity_topic_correlation", o.popularity_topic_correlation},
      {"vocabulary_size", o.vocabulary_size},
      {"title_words", o.title_words},
      {"description_words", o.description_words},
      {"word_topic_sharpness", o.word_topic_sharpness},
      {"view_threshold_s", o.view_threshold_s},
      {"bias",
       {{"popularity_weight", b.popularity_weight},
        {"recency_weight", b.recency_weight},
        {"history_weight", b.history_weight},
        {"depth_decay", b.depth_decay},
        {"get_popularity_penalty", b.get_popularity_penalty},
        {"epoch_view_drift", b.epoch_view_drift},
        {"views_lognormal", {b.views_log_mu, b.views_log_sigma}},
        {"account_mode_noise", noise}}}};
  json faults = json::array();
  for (const auto& f : spec.faults) {
    faults.push_back(json{{"group", f.group == 0 ? "a" : "b"},
                          {"tree", f.tree},
                          {"path", f.path},
                          {"depth", f.depth},
                          {"kind", FaultKindName(f.kind)},
                          {"list_length", f.list_length}});
  }
  return json{{"schema_version", kSpecSchemaVersion},
              {"name", spec.name},
              {"rng_seed", spec.rng_seed},
              {"n_trees_per_group", spec.n_trees_per_group},
              {"resamples", spec.resamples},
              {"resample_paths_per_tree", spec.resample_paths_per_tree},
              {"world", std::move(world)},
              {"config_a", ConfigToJson(spec.config_a)},
              {"config_b", ConfigToJson(spec.config_b)},
              {"faults", std::move(faults)}};
}

std::string SpecHash(const ExperimentSpec& spec) {
  const std::string canonical = SpecToJson(spec).dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(canonical.data(), canonical.size(), digest, &length,
                 EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

json WorldToJson(const SimWorld& world) {
  json videos = json::array();
  for (const auto& v : world.catalog()) {
    videos.push_back(json{{"video_id", v.video_id},
                          {"channel_id", v.channel_id},
                          {"views", v.views},
                          {"duration_s", v.duration_s},
                          {"title", v.title},
                          {"description", v.description}});
  }
  return json{{"seed", world.seed()},
              {"view_threshold_s", world.view_threshold_s()},
              {"channels", world.channels()},
              {"videos", std::move(videos)}};
}

}  // namespace sockaudit
