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

#ifndef SOCKAUDIT_CONFIG_H_
#define SOCKAUDIT_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "sockaudit/orchestrator.h"

namespace sockaudit {

inline constexpr int kSpecSchemaVersion = 1;

// Parses an experiment file. Training sets and seeds may be given as video
// ids or as selectors ({"select": "most_viewed" | "least_viewed" |
// "random" | "nearest", ...}); selectors are resolved against the
// generated world, so the returned spec only holds concrete ids. Defaults:
// n_rec 40, depth 10, n_paths 5, 8 trees per group, 1,000,000 resamples.
//
// Throws ValidationError with a dotted path to the offending field
// ("config_b.watch_fraction: ..."). Unknown keys are errors when strict.
ExperimentSpec ParseSpec(std::string_view document, bool strict = true);
ExperimentSpec LoadSpec(const std::filesystem::path& file, bool strict = true);

// Only the "world" section of an experiment file (defaults when absent).
// Other sections are not checked.
WorldSpec ParseWorldSpec(std::string_view document, bool strict = true);

// Canonical form; ParseSpec(SpecToJson(s).dump()) == s.
nlohmann::json SpecToJson(const ExperimentSpec& spec);

// Hex SHA-256 of the canonical form.
std::string SpecHash(const ExperimentSpec& spec);

// Catalog dump used by `world gen`.
nlohmann::json WorldToJson(const SimWorld& world);

}  // namespace sockaudit

#endif  // SOCKAUDIT_CONFIG_H_
