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

#ifndef SOCKAUDIT_RNG_H_
#define SOCKAUDIT_RNG_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>

namespace sockaudit {

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a, 64 bit.
constexpr std::uint64_t HashString(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

constexpr std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  return Mix64(Mix64(base) ^ (stream * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
}

// Counter-based generator: output k is a pure function of (key, k), so
// independent streams can be opened anywhere without sequential seeding.
// Satisfies UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(Mix64(key)), counter_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    ++counter_;
    return Mix64(key_ ^ (counter_ * 0x9E3779B97F4A7C15ULL));
  }

  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

// The std:: distributions are implementation-defined, so the helpers below
// keep every stream reproducible across standard libraries.

// Uniform on [0, 1) with 53 random bits.
inline double UniformDouble(StreamRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on [0, n), unbiased (Lemire).
std::size_t UniformIndex(StreamRng& rng, std::size_t n);

// Standard normal via Box-Muller; consumes exactly two outputs.
double StandardNormal(StreamRng& rng);

}  // namespace sockaudit

#endif  // SOCKAUDIT_RNG_H_
