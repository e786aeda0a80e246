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

#ifndef SOCKAUDIT_COMMON_H_
#define SOCKAUDIT_COMMON_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sockaudit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Input that violates a documented contract (bad config, malformed document).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough complete trees (or aligned nodes) to run an analysis.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AccountMode { kFull, kCookies, kClear };
enum class InteractionMode { kGet, kClick };
enum class Characteristic { kPop, kDiv, kSem };

inline constexpr Characteristic kAllCharacteristics[] = {
    Characteristic::kPop, Characteristic::kDiv, Characteristic::kSem};

std::string_view ToString(AccountMode mode);
std::string_view ToString(InteractionMode mode);
std::string_view ToString(Characteristic c);

// Throw ValidationError on unknown names.
AccountMode ParseAccountMode(std::string_view name);
InteractionMode ParseInteractionMode(std::string_view name);
Characteristic ParseCharacteristic(std::string_view name);

// pop and div deltas are signed differences; sem is a similarity.
constexpr bool IsAntisymmetric(Characteristic c) {
  return c != Characteristic::kSem;
}

}  // namespace sockaudit

#endif  // SOCKAUDIT_COMMON_H_
