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

#include "sockaudit/tree.h"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace sockaudit {

using nlohmann::json;

bool operator==(const VideoMeta& a, const VideoMeta& b) {
  if (a.video_id != b.video_id || a.channel_id != b.channel_id ||
      a.views != b.views || a.duration_s != b.duration_s ||
      a.title != b.title || a.description != b.description) {
    return false;
  }
  if (a.topic.has_value() != b.topic.has_value()) return false;
  if (!a.topic) return true;
  return a.topic->size() == b.topic->size() &&
         (a.topic->array() == b.topic->array()).all();
}

namespace {

std::string Where(int path, int depth) {
  return "(" + std::to_string(path) + "," + std::to_string(depth) + ")";
}

}  // namespace

RecommendationTree RecommendationTree::FromParts(TreeParts parts) {
  if (parts.paths < 1) throw ValidationError("tree needs at least one path");
  if (parts.depth < 0) throw ValidationError("tree depth must be >= 0");
  if (parts.n_rec < 1) throw ValidationError("N_rec must be >= 1");
  if (parts.seed.empty()) throw ValidationError("tree seed is empty");
  if (!parts.columns.empty() &&
      static_cast<int>(parts.columns.size()) != parts.paths) {
    throw ValidationError("columns must list one entry per path");
  }

  auto in_range = [&](int path, int depth) {
    return path >= 0 && path < parts.paths && depth >= 0 &&
           depth <= parts.depth;
  };

  for (const auto& [pos, node] : parts.nodes) {
    const std::string at = Where(pos.path, pos.depth);
    if (node.path != pos.path || node.depth != pos.depth) {
      throw ValidationError("node key/position mismatch at " + at);
    }
    if (!in_range(pos.path, pos.depth)) {
      throw ValidationError("node index out of range at " + at);
    }
    if (node.recommendations.empty()) {
      throw ValidationError("empty recommendation list at " + at);
    }
    if (static_cast<int>(node.recommendations.size()) > parts.n_rec) {
      throw ValidationError("more than N_rec recommendations at " + at);
    }
    if (pos.depth == 0 && node.watched != parts.seed) {
      throw ValidationError("root of path " + std::to_string(pos.path) +
                            " watches '" + node.watched + "', not the seed '" +
                            parts.seed + "'");
    }
    for (const auto& rec : node.recommendations) {
      if (rec.video_id.empty()) {
        throw ValidationError("recommendation without video_id at " + at);
      }
      if (rec.views < 0 || rec.duration_s < 0) {
        throw ValidationError("negative views/duration for '" + rec.video_id +
                              "' at " + at);
      }
    }
  }

  std::set<Position> gap_positions;
  for (const auto& gap : parts.gaps) {
    const Position pos{gap.path, gap.depth};
    const std::string at = Where(gap.path, gap.depth);
    if (!in_range(gap.path, gap.depth)) {
      throw ValidationError("gap index out of range at " + at);
    }
    if (parts.nodes.contains(pos)) {
      throw ValidationError("position " + at + " is both a node and a gap");
    }
    if (!gap_positions.insert(pos).second) {
      throw ValidationError("duplicate gap at " + at);
    }
  }
  const std::size_t expected =
      static_cast<std::size_t>(parts.paths) * (parts.depth + 1);
  if (parts.nodes.size() + gap_positions.size() != expected) {
    throw ValidationError(
        "every position must be either a node or a recorded gap");
  }

  RecommendationTree tree;
  tree.seed_ = std::move(parts.seed);
  tree.config_tag_ = std::move(parts.config_tag);
  tree.paths_ = parts.paths;
  tree.depth_ = parts.depth;
  tree.n_rec_ = parts.n_rec;
  tree.columns_ = std::move(parts.columns);
  tree.nodes_ = std::move(parts.nodes);
  tree.gaps_ = std::move(parts.gaps);
  std::sort(tree.gaps_.begin(), tree.gaps_.end(),
            [](const CrawlGap& a, const CrawlGap& b) {
              return Position{a.path, a.depth} < Position{b.path, b.depth};
            });
  return tree;
}

const TreeNode* RecommendationTree::node_at(int path, int depth) const {
  if (path < 0 || path >= paths_ || depth < 0 || depth > depth_) {
    throw std::out_of_range("node_at" + Where(path, depth) +
                            " outside tree of shape P=" +
                            std::to_string(paths_) +
                            ", D=" + std::to_string(depth_));
  }
  auto it = nodes_.find(Position{path, depth});
  return it == nodes_.end() ? nullptr : &it->second;
}

RecommendationTree BuildTree(std::string seed,
                             std::span<const PathRecord> records,
                             std::string config_tag, TreeShape shape) {
  if (records.empty()) throw ValidationError("no path records");
  if (shape.depth < 0 || shape.n_rec < 1) {
    throw ValidationError("invalid tree shape");
  }
  TreeParts parts;
  parts.seed = std::move(seed);
  parts.config_tag = std::move(config_tag);
  parts.paths = static_cast<int>(records.size());
  parts.depth = shape.depth;
  parts.n_rec = shape.n_rec;

  bool have_columns = true;
  for (int path = 0; path < parts.paths; ++path) {
    const PathRecord& record = records[path];
    have_columns = have_columns && record.column >= 0;
    for (const Observation& obs : record.observations) {
      if (obs.depth < 0 || obs.depth > shape.depth) {
        throw ValidationError("observation depth " + std::to_string(obs.depth) +
                              " outside [0," + std::to_string(shape.depth) +
                              "] on path " + std::to_string(path));
      }
      if (obs.depth == 0 && obs.watched != parts.seed) {
        throw ValidationError("path " + std::to_string(path) +
                              " starts at '" + obs.watched +
                              "' but the tree seed is '" + parts.seed + "'");
      }
      TreeNode node;
      node.path = path;
      node.depth = obs.depth;
      node.watched = obs.watched;
      node.clamped = obs.clamped;
      node.epoch = obs.epoch;
      const std::size_t keep = std::min<std::size_t>(
          obs.recommendations.size(), static_cast<std::size_t>(shape.n_rec));
      node.recommendations.assign(obs.recommendations.begin(),
                                  obs.recommendations.begin() + keep);
      for (auto& rec : node.recommendations) rec.topic.reset();
      if (!parts.nodes.emplace(Position{path, obs.depth}, std::move(node))
               .second) {
        throw ValidationError("duplicate observation at " +
                              Where(path, obs.depth));
      }
    }
    const std::string reason = record.failure.value_or("missing observation");
    for (int depth = 0; depth <= shape.depth; ++depth) {
      if (!parts.nodes.contains(Position{path, depth})) {
        parts.gaps.push_back(CrawlGap{path, depth, reason});
      }
    }
  }
  if (have_columns) {
    for (const auto& record : records) parts.columns.push_back(record.column);
  }
  return RecommendationTree::FromParts(std::move(parts));
}

namespace {

void CheckKeys(const json& object, std::initializer_list<std::string_view> known,
               std::string_view context, bool strict) {
  if (!object.is_object()) {
    throw ValidationError(std::string(context) + " must be an object");
  }
  if (!strict) return;
  for (const auto& [key, value] : object.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError("unknown field '" + key + "' in " +
                            std::string(context));
    }
  }
}

template <typename T>
T Required(const json& object, const char* key, std::string_view context) {
  auto it = object.find(key);
  if (it == object.end()) {
    throw ValidationError("missing field '" + std::string(key) + "' in " +
                          std::string(context));
  }
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("bad type for '" + std::string(key) + "' in " +
                          std::string(context) + ": " + e.what());
  }
}

json RecToJson(const VideoMeta& rec) {
  return json{{"video_id", rec.video_id},     {"channel_id", rec.channel_id},
              {"views", rec.views},           {"duration_s", rec.duration_s},
              {"title", rec.title},           {"description", rec.description}};
}

VideoMeta RecFromJson(const json& j, bool strict) {
  static constexpr std::string_view kContext = "recommendation";
  CheckKeys(j,
            {"video_id", "channel_id", "views", "duration_s", "title",
             "description"},
            kContext, strict);
  VideoMeta rec;
  rec.video_id = Required<std::string>(j, "video_id", kContext);
  rec.channel_id = Required<std::string>(j, "channel_id", kContext);
  rec.views = Required<std::int64_t>(j, "views", kContext);
  rec.duration_s = Required<std::int64_t>(j, "duration_s", kContext);
  rec.title = j.value("title", std::string());
  rec.description = j.value("description", std::string());
  return rec;
}

}  // namespace

std::string Serialize(const RecommendationTree& tree) {
  json nodes = json::array();
  for (const auto& [pos, node] : tree.nodes()) {
    json recs = json::array();
    for (const auto& rec : node.recommendations) recs.push_back(RecToJson(rec));
    json j{{"path", node.path},
           {"depth", node.depth},
           {"watched", node.watched},
           {"epoch", node.epoch},
           {"recs", std::move(recs)}};
    if (node.clamped) j["clamped"] = true;
    nodes.push_back(std::move(j));
  }
  json doc{{"schema_version", 1},
           {"seed", tree.seed()},
           {"config_tag", tree.config_tag()},
           {"P", tree.paths()},
           {"D", tree.depth()},
           {"N_rec", tree.n_rec()},
           {"nodes", std::move(nodes)}};
  if (!tree.columns().empty()) doc["columns"] = tree.columns();
  if (!tree.gaps().empty()) {
    json gaps = json::array();
    for (const auto& gap : tree.gaps()) {
      gaps.push_back(
          json{{"path", gap.path}, {"depth", gap.depth}, {"reason", gap.reason}});
    }
    doc["gaps"] = std::move(gaps);
  }
  return doc.dump(1) + "\n";
}

RecommendationTree Deserialize(std::string_view document, ParseMode mode) {
  const bool strict = mode == ParseMode::kStrict;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("tree document is not valid JSON: ") +
                          e.what());
  }
  CheckKeys(doc,
            {"schema_version", "seed", "config_tag", "P", "D", "N_rec",
             "nodes", "columns", "gaps"},
            "tree", strict);
  if (doc.contains("schema_version") && doc["schema_version"] != 1) {
    throw ValidationError("unsupported tree schema_version");
  }
  TreeParts parts;
  parts.seed = Required<std::string>(doc, "seed", "tree");
  parts.config_tag = Required<std::string>(doc, "config_tag", "tree");
  parts.paths = Required<int>(doc, "P", "tree");
  parts.depth = Required<int>(doc, "D", "tree");
  parts.n_rec = Required<int>(doc, "N_rec", "tree");
  if (doc.contains("columns")) {
    parts.columns = Required<std::vector<int>>(doc, "columns", "tree");
  }
  const json nodes = Required<json>(doc, "nodes", "tree");
  if (!nodes.is_array()) throw ValidationError("'nodes' must be an array");
  for (const json& jn : nodes) {
    CheckKeys(jn, {"path", "depth", "watched", "recs", "clamped", "epoch"},
              "node", strict);
    TreeNode node;
    node.path = Required<int>(jn, "path", "node");
    node.depth = Required<int>(jn, "depth", "node");
    node.watched = Required<std::string>(jn, "watched", "node");
    node.clamped = jn.value("clamped", false);
    node.epoch = jn.value("epoch", std::int64_t{0});
    const json recs = Required<json>(jn, "recs", "node");
    if (!recs.is_array()) throw ValidationError("'recs' must be an array");
    for (const json& jr : recs) {
      node.recommendations.push_back(RecFromJson(jr, strict));
    }
    const Position pos{node.path, node.depth};
    if (!parts.nodes.emplace(pos, std::move(node)).second) {
      throw ValidationError("duplicate node " + Where(pos.path, pos.depth));
    }
  }
  if (doc.contains("gaps")) {
    for (const json& jg : Required<json>(doc, "gaps", "tree")) {
      CheckKeys(jg, {"path", "depth", "reason"}, "gap", strict);
      parts.gaps.push_back(CrawlGap{Required<int>(jg, "path", "gap"),
                                    Required<int>(jg, "depth", "gap"),
                                    jg.value("reason", std::string())});
    }
  }
  return RecommendationTree::FromParts(std::move(parts));
}

}  // namespace sockaudit
