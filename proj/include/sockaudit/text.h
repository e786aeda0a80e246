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

#ifndef SOCKAUDIT_TEXT_H_
#define SOCKAUDIT_TEXT_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sockaudit/common.h"

namespace sockaudit {

// Averaged word vectors. Zero norm is allowed (empty document).
using DocVector = Vector;

struct TokenDoc {
  std::vector<std::string> tokens;

  friend bool operator==(const TokenDoc&, const TokenDoc&) = default;
};

// Document frequencies over raw lowercase tokens (before stop-word removal
// and lemmatization).
struct CorpusStats {
  std::size_t doc_count = 0;
  std::unordered_map<std::string, std::size_t> doc_freq;

  // doc_freq[token] / doc_count, 0 for unseen tokens.
  double Fraction(std::string_view token) const;
};

// Stop-words plus the lemmatizer's exception table.
class Lexicon {
 public:
  Lexicon(std::unordered_set<std::string> stop_words,
          std::unordered_map<std::string, std::string> exceptions);

  // The lists shipped in data/ and compiled into the library.
  static const Lexicon& Bundled();
  static Lexicon FromFiles(const std::filesystem::path& stop_words,
                           const std::filesystem::path& exceptions);

  bool IsStopWord(std::string_view token) const;

  // Exceptions table first, then suffix rules (-ies, -sses, -es, -s, -ing,
  // -ed) applied until nothing changes. Never returns a stop-word, so the
  // output is a fixed point of Lemmatize.
  std::string Lemmatize(std::string_view token) const;

  const std::unordered_map<std::string, std::string>& exceptions() const {
    return exceptions_;
  }

 private:
  std::string ApplyOneRule(const std::string& token) const;

  std::unordered_set<std::string> stop_words_;
  std::unordered_map<std::string, std::string> exceptions_;
};

// Lowercases, drops whitespace-delimited URL chunks (scheme:// or www.),
// and splits the rest on non-alphanumeric boundaries.
std::vector<std::string> Tokenize(std::string_view text);

// Throws ValidationError on an empty corpus.
CorpusStats BuildCorpusStats(std::span<const std::string> docs);

inline constexpr double kMaxDocumentFraction = 0.5;

// lowercase -> tokenize -> drop URLs -> drop stop-words -> drop tokens in
// more than half the corpus -> lemmatize. A lemma that lands on a stop-word
// or a too-frequent token is dropped as well.
TokenDoc Preprocess(std::string_view text, const CorpusStats& stats,
                    const Lexicon& lexicon = Lexicon::Bundled());

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dimension() const = 0;
  virtual Vector Embed(std::string_view token) const = 0;
};

// Maps every token to a deterministic pseudo-random unit vector keyed by a
// hash of the token. Thread-safe; vectors are memoized.
class HashedEmbeddingProvider : public EmbeddingProvider {
 public:
  static constexpr int kDefaultDimension = 64;

  explicit HashedEmbeddingProvider(int dimension = kDefaultDimension,
                                   std::uint64_t salt = 0);

  int dimension() const override { return dimension_; }
  Vector Embed(std::string_view token) const override;

 private:
  int dimension_;
  std::uint64_t salt_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, Vector> cache_;
};

// Fixed vectors for a known vocabulary; out-of-vocabulary tokens fall back
// to the hashed provider of the same dimension.
class TableEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(
      std::unordered_map<std::string, Vector> table);

  int dimension() const override { return fallback_.dimension(); }
  Vector Embed(std::string_view token) const override;

 private:
  static int DimensionOf(const std::unordered_map<std::string, Vector>& t);

  std::unordered_map<std::string, Vector> table_;
  HashedEmbeddingProvider fallback_;
};

// Arithmetic mean of the token vectors; the zero vector for an empty doc.
// Throws ValidationError if the provider returns a vector of the wrong size.
DocVector Embed(const TokenDoc& doc, const EmbeddingProvider& provider);

// Cosine similarity, defined as 0 when either vector has zero norm.
template <typename DerivedA, typename DerivedB>
double DocSim(const Eigen::MatrixBase<DerivedA>& a,
              const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("docsim dimension mismatch: " +
                          std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = a.dot(b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace sockaudit

#endif  // SOCKAUDIT_TEXT_H_
