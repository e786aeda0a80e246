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

#include "sockaudit/common.h"

#include <string>

namespace sockaudit {

std::string_view ToString(AccountMode mode) {
  switch (mode) {
    case AccountMode::kFull:
      return "full";
    case AccountMode::kCookies:
      return "cookies";
    case AccountMode::kClear:
      return "clear";
  }
  return "?";
}

std::string_view ToString(InteractionMode mode) {
  return mode == InteractionMode::kGet ? "get" : "click";
}

std::string_view ToString(Characteristic c) {
  switch (c) {
    case Characteristic::kPop:
      return "pop";
    case Characteristic::kDiv:
      return "div";
    case Characteristic::kSem:
      return "sem";
  }
  return "?";
}

AccountMode ParseAccountMode(std::string_view name) {
  if (name == "full") return AccountMode::kFull;
  if (name == "cookies") return AccountMode::kCookies;
  if (name == "clear") return AccountMode::kClear;
  throw ValidationError("unknown account mode '" + std::string(name) +
                        "' (expected full|cookies|clear)");
}

InteractionMode ParseInteractionMode(std::string_view name) {
  if (name == "get") return InteractionMode::kGet;
  if (name == "click") return InteractionMode::kClick;
  throw ValidationError("unknown interaction mode '" + std::string(name) +
                        "' (expected get|click)");
}

Characteristic ParseCharacteristic(std::string_view name) {
  if (name == "pop") return Characteristic::kPop;
  if (name == "div") return Characteristic::kDiv;
  if (name == "sem") return Characteristic::kSem;
  throw ValidationError("unknown characteristic '" + std::string(name) +
                        "' (expected pop|div|sem)");
}

}  // namespace sockaudit
