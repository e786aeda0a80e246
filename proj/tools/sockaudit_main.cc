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

// Command-line front end: world generation, runs, analysis and reports.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "sockaudit/config.h"
#include "sockaudit/report.h"
#include "sockaudit/run.h"

namespace {

namespace fs = std::filesystem;
using namespace sockaudit;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitInsufficient = 3;

std::string ReadAll(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<Characteristic> Characteristics(const std::string& name) {
  if (name == "all") {
    return {std::begin(kAllCharacteristics), std::end(kAllCharacteristics)};
  }
  return {ParseCharacteristic(name)};
}

struct Flags {
  std::string spec;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> resamples;
  bool split = false;
  std::string characteristic = "all";
  std::string slice = "none";
  unsigned threads = 0;
  bool single_threaded = false;
};

int WorldGen(const Flags& f) {
  WorldSpec world;
  if (!f.spec.empty()) world = ParseWorldSpec(ReadAll(f.spec));
  if (f.seed) world.seed = *f.seed;
  const std::string doc = WorldToJson(world.Generate()).dump(1) + "\n";
  if (f.out.empty()) {
    std::cout << doc;
    return kExitOk;
  }
  fs::path path = f.out;
  if (fs::is_directory(path)) path /= "world.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc;
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int RunCommand(const Flags& f) {
  ExperimentSpec spec = LoadSpec(f.spec);
  if (f.seed) spec.rng_seed = *f.seed;
  if (f.resamples) spec.resamples = *f.resamples;
  spec.Validate();
  const RunManifest m =
      Run(spec, f.out,
          f.single_threaded ? Scheduler::kSingleThreaded : Scheduler::kThreaded);
  std::cout << "run " << f.out << ": " << m.trees.size() << " trees, "
            << m.partial_count() << " partial, spec " << m.spec_hash << "\n";
  return kExitOk;
}

int AnalyzeCommand(const Flags& f) {
  const LoadedRun run = LoadRun(f.out);
  AnalyzeOptions options;
  options.characteristics = Characteristics(f.characteristic);
  options.split = f.split;
  options.slice = ParseSliceMode(f.slice);
  options.bootstrap.n_resamples = f.resamples.value_or(run.spec.resamples);
  if (options.bootstrap.n_resamples < kMinResamples) {
    throw ValidationError("--resamples must be >= " +
                          std::to_string(kMinResamples));
  }
  options.bootstrap.seed = f.seed.value_or(run.spec.rng_seed);
  options.bootstrap.threads = f.threads;
  const Analysis analysis = Analyze(f.out, options);
  WriteAnalysis(analysis, f.out);
  std::cout << RenderMarkdown(analysis);
  return kExitOk;
}

int ReportCommand(const Flags& f) {
  const fs::path dir = f.out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(ReadAll(dir / "analysis.json"));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("analysis.json: ") + e.what());
  }
  const Analysis analysis = AnalysisFromJson(doc);
  WriteAnalysis(analysis, dir);
  std::cout << RenderMarkdown(analysis);
  return kExitOk;
}

int ValidateCommand(const Flags& f) {
  if (f.spec.empty() && f.out.empty()) {
    throw ValidationError("validate needs --spec or --out");
  }
  if (!f.spec.empty()) {
    const ExperimentSpec spec = LoadSpec(f.spec);
    std::cout << "spec ok: " << SpecHash(spec) << "\n";
  }
  if (!f.out.empty()) {
    const LoadedRun run = LoadRun(f.out);
    std::cout << "run ok: " << run.manifest.trees.size() << " trees, "
              << run.manifest.partial_count() << " partial\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sock-puppet recommendation audit toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto add_spec = [&](CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--spec", f.spec, "Experiment file (JSON)");
    if (required) opt->required();
  };
  auto add_seed = [&](CLI::App* cmd, const char* help) {
    cmd->add_option("--seed", f.seed, help);
  };

  CLI::App* world = app.add_subcommand("world", "Synthetic world tools");
  world->require_subcommand(1);
  CLI::App* gen = world->add_subcommand("gen", "Generate and dump a catalog");
  add_spec(gen, false);
  gen->add_option("--out", f.out, "Output file or directory");
  add_seed(gen, "World seed override");

  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  add_spec(run, true);
  run->add_option("--out", f.out, "Run directory")->required();
  add_seed(run, "rng_seed override");
  run->add_option("--resamples", f.resamples, "Stored resample count");
  run->add_flag("--single-threaded", f.single_threaded,
                "Round-robin crawlers on one thread");

  CLI::App* analyze = app.add_subcommand("analyze", "Analyze a run directory");
  analyze->add_option("--out", f.out, "Run directory")->required();
  add_seed(analyze, "Bootstrap seed (default: the run's rng_seed)");
  analyze->add_option("--resamples", f.resamples,
                      "Bootstrap resamples (default: from the spec)");
  analyze->add_flag("--split,!--no-split", f.split,
                    "Split each group into two disjoint halves");
  analyze->add_option("--characteristic", f.characteristic)
      ->check(CLI::IsMember({"pop", "div", "sem", "all"}));
  analyze->add_option("--slice", f.slice)
      ->check(CLI::IsMember({"none", "breadth", "depth"}));
  analyze->add_option("--threads", f.threads, "Bootstrap threads (0 = all)");

  CLI::App* report = app.add_subcommand("report", "Render a stored analysis");
  report->add_option("--out", f.out, "Run directory")->required();

  CLI::App* validate =
      app.add_subcommand("validate", "Check a spec file and/or a run directory");
  add_spec(validate, false);
  validate->add_option("--out", f.out, "Run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (gen->parsed()) return WorldGen(f);
    if (run->parsed()) return RunCommand(f);
    if (analyze->parsed()) return AnalyzeCommand(f);
    if (report->parsed()) return ReportCommand(f);
    if (validate->parsed()) return ValidateCommand(f);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InsufficientDataError& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitInsufficient;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
