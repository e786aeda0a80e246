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

#include "sockaudit/report.h"

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sockaudit/node_metrics.h"
#include "sockaudit/rng.h"
#include "sockaudit/run.h"
#include "sockaudit/text.h"

namespace sockaudit {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

GroupSummary Summarize(std::string label, std::span<const TreeMetrics> trees) {
  GroupSummary s;
  s.label = std::move(label);
  s.n_trees = static_cast<int>(trees.size());
  double pop = 0.0;
  double div = 0.0;
  std::size_t n = 0;
  for (const auto& t : trees) {
    for (const auto& [pos, m] : t.nodes()) {
      pop += m.pop;
      div += m.div;
      ++n;
    }
  }
  if (n > 0) {
    s.mean_views = pop / static_cast<double>(n);
    s.mean_entropy = div / static_cast<double>(n);
  }
  return s;
}

Comparison Compare(std::string name, std::span<const TreeMetrics> a,
                   std::span<const TreeMetrics> b, const std::string& label_a,
                   const std::string& label_b, const AnalyzeOptions& options,
                   std::uint64_t stream) {
  if (a.size() < 2 || b.size() < 2) {
    throw InsufficientDataError("comparison '" + name +
                                "' needs at least 2 complete trees per group");
  }
  Comparison cmp;
  cmp.name = std::move(name);
  cmp.a = Summarize(label_a, a);
  cmp.b = Summarize(label_b, b);
  for (Characteristic c : options.characteristics) {
    const DiffDistribution within =
        Pool(WithinGroup(a, c, 0), WithinGroup(b, c, 1));
    const DiffDistribution across = AcrossGroup(a, b, c);
    BootstrapOptions boot = options.bootstrap;
    boot.seed = DeriveSeed(DeriveSeed(options.bootstrap.seed, stream),
                           static_cast<std::uint64_t>(c));
    cmp.effects.push_back(BootstrapEffect(within, across, boot));
  }
  return cmp;
}

std::vector<int> Iota(int from, int to) {
  std::vector<int> v;
  for (int i = from; i < to; ++i) v.push_back(i);
  return v;
}

std::string Fixed2(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string Raw(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double Scale(Characteristic c) {
  return c == Characteristic::kPop ? 1e-6 : 1.0;
}

json EffectToJson(const EffectReport& e) {
  return json{{"characteristic", ToString(e.characteristic)},
              {"mean_within", e.mean_within},
              {"mean_across", e.mean_across},
              {"mean_effect", e.mean_effect},
              {"ci95", {e.ci95.lower, e.ci95.upper}},
              {"ci99", {e.ci99.lower, e.ci99.upper}},
              {"significant95", e.significant95},
              {"significant99", e.significant99},
              {"n_resamples", e.n_resamples},
              {"n_within", e.n_within},
              {"n_across", e.n_across}};
}

EffectReport EffectFromJson(const json& j) {
  EffectReport e;
  e.characteristic = ParseCharacteristic(j.at("characteristic").get<std::string>());
  e.mean_within = j.at("mean_within").get<double>();
  e.mean_across = j.at("mean_across").get<double>();
  e.mean_effect = j.at("mean_effect").get<double>();
  e.ci95 = {j.at("ci95").at(0).get<double>(), j.at("ci95").at(1).get<double>()};
  e.ci99 = {j.at("ci99").at(0).get<double>(), j.at("ci99").at(1).get<double>()};
  e.significant95 = j.at("significant95").get<bool>();
  e.significant99 = j.at("significant99").get<bool>();
  e.n_resamples = j.at("n_resamples").get<std::size_t>();
  e.n_within = j.at("n_within").get<std::size_t>();
  e.n_across = j.at("n_across").get<std::size_t>();
  return e;
}

json GroupToJson(const GroupSummary& g) {
  return json{{"label", g.label},
              {"n_trees", g.n_trees},
              {"mean_views", g.mean_views},
              {"mean_entropy", g.mean_entropy}};
}

GroupSummary GroupFromJson(const json& j) {
  GroupSummary g;
  g.label = j.at("label").get<std::string>();
  g.n_trees = j.at("n_trees").get<int>();
  g.mean_views = j.at("mean_views").get<double>();
  g.mean_entropy = j.at("mean_entropy").get<double>();
  return g;
}

const EffectReport* Find(const Comparison& cmp, Characteristic c) {
  for (const auto& e : cmp.effects) {
    if (e.characteristic == c) return &e;
  }
  return nullptr;
}

std::string Interval(const ConfidenceInterval& ci, bool significant,
                     double scale) {
  std::string s =
      "[" + Fixed2(ci.lower * scale) + ", " + Fixed2(ci.upper * scale) + "]";
  return significant ? "**" + s + "**" : s;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string_view ToString(SliceMode mode) {
  switch (mode) {
    case SliceMode::kNone:
      return "none";
    case SliceMode::kBreadth:
      return "breadth";
    case SliceMode::kDepth:
      return "depth";
  }
  return "?";
}

SliceMode ParseSliceMode(std::string_view name) {
  if (name == "none") return SliceMode::kNone;
  if (name == "breadth") return SliceMode::kBreadth;
  if (name == "depth") return SliceMode::kDepth;
  throw ValidationError("unknown slice '" + std::string(name) +
                        "' (expected none|breadth|depth)");
}

std::vector<Comparison> CompareTrees(std::span<const RecommendationTree> a,
                                     std::span<const RecommendationTree> b,
                                     const std::string& label_a,
                                     const std::string& label_b,
                                     const AnalyzeOptions& options) {
  if (options.characteristics.empty()) {
    throw ValidationError("no characteristics selected");
  }
  std::vector<RecommendationTree> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  if (all.empty()) throw InsufficientDataError("no complete trees to analyze");
  const CorpusStats stats = CorpusFromTrees(all);
  const HashedEmbeddingProvider provider;
  const MetricsContext ctx{&stats, &provider};

  auto compute = [&](std::span<const RecommendationTree> trees) {
    std::vector<TreeMetrics> out;
    out.reserve(trees.size());
    for (const auto& t : trees) out.push_back(TreeMetrics::Compute(t, ctx));
    return out;
  };
  const std::vector<TreeMetrics> ma = compute(a);
  const std::vector<TreeMetrics> mb = compute(b);

  std::vector<Comparison> out;
  if (options.slice == SliceMode::kNone) {
    if (!options.split) {
      out.push_back(Compare(label_a + " vs " + label_b, ma, mb, label_a,
                            label_b, options, 0));
      return out;
    }
    if (ma.size() < 4 || mb.size() < 4) {
      throw InsufficientDataError(
          "split mode needs at least 4 complete trees per group");
    }
    const std::size_t ha = ma.size() / 2;
    const std::size_t hb = mb.size() / 2;
    const std::span<const TreeMetrics> sa(ma), sb(mb);
    out.push_back(Compare("set 1", sa.first(ha), sb.first(hb), label_a,
                          label_b, options, 1));
    out.push_back(Compare("set 2", sa.subspan(ha), sb.subspan(hb), label_a,
                          label_b, options, 2));
    return out;
  }

  std::vector<TreeMetrics> pooled = ma;
  pooled.insert(pooled.end(), mb.begin(), mb.end());
  if (pooled.size() < 2) {
    throw InsufficientDataError("slicing needs at least 2 complete trees");
  }
  const int paths = pooled.front().paths();
  const int depth = pooled.front().depth();
  std::vector<TreeMetrics> first, second;
  std::string name, first_label, second_label;
  if (options.slice == SliceMode::kBreadth) {
    const std::vector<int> left{0}, right{paths - 1}, depths = Iota(0, depth + 1);
    for (const auto& t : pooled) {
      first.push_back(t.Slice(left, depths));
      second.push_back(t.Slice(right, depths));
    }
    name = "breadth";
    first_label = "P_left";
    second_label = "P_right";
  } else {
    if (depth < 1) throw InsufficientDataError("depth slicing needs depth >= 1");
    const std::vector<int> all_paths = Iota(0, paths), top{1}, bottom{depth};
    for (const auto& t : pooled) {
      first.push_back(t.Slice(all_paths, top));
      second.push_back(t.Slice(all_paths, bottom));
    }
    name = "depth";
    first_label = "D_top";
    second_label = "D_bottom";
  }
  out.push_back(
      Compare(name, first, second, first_label, second_label, options, 3));
  return out;
}

Analysis Analyze(const fs::path& run_dir, const AnalyzeOptions& options) {
  const LoadedRun run = LoadRun(run_dir);
  Analysis analysis;
  analysis.spec_name = run.spec.name;
  analysis.spec_hash = run.manifest.spec_hash;
  analysis.slice = options.slice;
  analysis.split = options.split;
  analysis.n_resamples = options.bootstrap.n_resamples;
  analysis.seed = options.bootstrap.seed;
  std::vector<RecommendationTree> a, b;
  for (const auto& t : run.trees_a) {
    if (t.complete()) a.push_back(t);
  }
  for (const auto& t : run.trees_b) {
    if (t.complete()) b.push_back(t);
  }
  analysis.excluded_partial =
      run.trees_a.size() + run.trees_b.size() - a.size() - b.size();
  analysis.comparisons =
      CompareTrees(a, b, GroupTag(run.spec, 0), GroupTag(run.spec, 1), options);
  return analysis;
}

json AnalysisToJson(const Analysis& analysis) {
  json comparisons = json::array();
  for (const auto& cmp : analysis.comparisons) {
    json effects = json::array();
    for (const auto& e : cmp.effects) effects.push_back(EffectToJson(e));
    comparisons.push_back(json{{"name", cmp.name},
                               {"a", GroupToJson(cmp.a)},
                               {"b", GroupToJson(cmp.b)},
                               {"effects", std::move(effects)}});
  }
  return json{{"spec_name", analysis.spec_name},
              {"spec_hash", analysis.spec_hash},
              {"slice", ToString(analysis.slice)},
              {"split", analysis.split},
              {"n_resamples", analysis.n_resamples},
              {"seed", analysis.seed},
              {"excluded_partial", analysis.excluded_partial},
              {"comparisons", std::move(comparisons)}};
}

Analysis AnalysisFromJson(const json& doc) {
  Analysis a;
  try {
    a.spec_name = doc.at("spec_name").get<std::string>();
    a.spec_hash = doc.at("spec_hash").get<std::string>();
    a.slice = ParseSliceMode(doc.at("slice").get<std::string>());
    a.split = doc.at("split").get<bool>();
    a.n_resamples = doc.at("n_resamples").get<std::size_t>();
    a.seed = doc.at("seed").get<std::uint64_t>();
    a.excluded_partial = doc.at("excluded_partial").get<std::size_t>();
    for (const json& c : doc.at("comparisons")) {
      Comparison cmp;
      cmp.name = c.at("name").get<std::string>();
      cmp.a = GroupFromJson(c.at("a"));
      cmp.b = GroupFromJson(c.at("b"));
      for (const json& e : c.at("effects")) cmp.effects.push_back(EffectFromJson(e));
      a.comparisons.push_back(std::move(cmp));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("analysis.json: ") + e.what());
  }
  return a;
}

std::string RenderCsv(const Analysis& analysis) {
  std::ostringstream out;
  out << "comparison,label_a,label_b,characteristic,mean_a,mean_b,"
         "mean_within,mean_across,mean_effect,ci95_lower,ci95_upper,"
         "ci99_lower,ci99_upper,significant95,significant99,n_within,"
         "n_across,n_resamples\n";
  for (const auto& cmp : analysis.comparisons) {
    for (const auto& e : cmp.effects) {
      std::string mean_a, mean_b;
      if (e.characteristic == Characteristic::kPop) {
        mean_a = Raw(cmp.a.mean_views);
        mean_b = Raw(cmp.b.mean_views);
      } else if (e.characteristic == Characteristic::kDiv) {
        mean_a = Raw(cmp.a.mean_entropy);
        mean_b = Raw(cmp.b.mean_entropy);
      }
      out << '"' << cmp.name << "\",\"" << cmp.a.label << "\",\""
          << cmp.b.label << "\"," << ToString(e.characteristic) << ','
          << mean_a << ',' << mean_b << ',' << Raw(e.mean_within) << ','
          << Raw(e.mean_across) << ',' << Raw(e.mean_effect) << ','
          << Raw(e.ci95.lower) << ',' << Raw(e.ci95.upper) << ','
          << Raw(e.ci99.lower) << ',' << Raw(e.ci99.upper) << ','
          << (e.significant95 ? "true" : "false") << ','
          << (e.significant99 ? "true" : "false") << ',' << e.n_within << ','
          << e.n_across << ',' << e.n_resamples << '\n';
    }
  }
  return out.str();
}

std::string RenderMarkdown(const Analysis& analysis) {
  std::ostringstream out;
  out << "# " << (analysis.spec_name.empty() ? "Audit report" : analysis.spec_name)
      << "\n\n";
  out << "Resamples: " << analysis.n_resamples << ". Slice: "
      << ToString(analysis.slice) << ". Split: "
      << (analysis.split ? "yes" : "no") << ".";
  if (analysis.excluded_partial > 0) {
    out << " Partial trees excluded: " << analysis.excluded_partial << ".";
  }
  out << "\n\nPopularity in millions of views, diversity in bits, semantics as "
         "cosine similarity. Bold intervals are significant.\n\n";
  out << "| Comparison | Configuration | #trees | mu_views | Pop 95% CI | "
         "Pop 99% CI | Pop mu_effect | mu_entropy | Div 95% CI | Div 99% CI | "
         "Div mu_effect | Sem 95% CI | Sem 99% CI | Sem mu_effect |\n";
  out << "|---|---|---:|---:|---|---|---:|---:|---|---|---:|---|---|---:|\n";
  for (const auto& cmp : analysis.comparisons) {
    for (int row = 0; row < 2; ++row) {
      const GroupSummary& g = row == 0 ? cmp.a : cmp.b;
      out << "| " << (row == 0 ? cmp.name : "") << " | " << g.label << " | "
          << g.n_trees << " | " << Fixed2(g.mean_views * 1e-6) << " | ";
      auto cells = [&](Characteristic c) {
        const EffectReport* e = Find(cmp, c);
        if (row != 0 || e == nullptr) {
          out << " |  |  | ";
          return;
        }
        const double s = Scale(c);
        out << Interval(e->ci95, e->significant95, s) << " | "
            << Interval(e->ci99, e->significant99, s) << " | "
            << Fixed2(e->mean_effect * s) << " | ";
      };
      cells(Characteristic::kPop);
      out << Fixed2(g.mean_entropy) << " | ";
      cells(Characteristic::kDiv);
      cells(Characteristic::kSem);
      out.seekp(-1, std::ios_base::cur);
      out << "\n";
    }
  }
  return out.str();
}

void WriteAnalysis(const Analysis& analysis, const fs::path& dir) {
  fs::create_directories(dir);
  WriteText(dir / "analysis.json", AnalysisToJson(analysis).dump(2) + "\n");
  WriteText(dir / "report.csv", RenderCsv(analysis));
  WriteText(dir / "report.md", RenderMarkdown(analysis));
}

}  // namespace sockaudit
