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

#include "sockaudit/text.h"

#include <cctype>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "sockaudit/rng.h"

namespace sockaudit {

// Defined in the generated bundled_data.cc.
extern const char* const kBundledStopWords;
extern const char* const kBundledLemmaExceptions;

namespace {

bool IsWordChar(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool HasVowel(std::string_view s) {
  for (char c : s) {
    if (IsVowel(c) || c == 'y') return true;
  }
  return false;
}

bool IsUrlChunk(std::string_view chunk) {
  std::size_t start = 0;
  while (start < chunk.size() &&
         !IsWordChar(static_cast<unsigned char>(chunk[start]))) {
    ++start;
  }
  chunk.remove_prefix(start);
  if (chunk.starts_with("www.")) return true;
  const std::size_t colon = chunk.find("://");
  if (colon == std::string_view::npos || colon == 0) return false;
  for (std::size_t i = 0; i < colon; ++i) {
    const unsigned char c = chunk[i];
    if (std::isalpha(c) == 0 && c != '+' && c != '-' && c != '.') return false;
  }
  return true;
}

std::vector<std::string> ReadLines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t first = 0;
    while (first < line.size() &&
           std::isspace(static_cast<unsigned char>(line[first]))) {
      ++first;
    }
    line.erase(0, first);
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::unordered_set<std::string> ParseStopWords(std::istream& in) {
  std::unordered_set<std::string> words;
  for (auto& line : ReadLines(in)) words.insert(std::move(line));
  return words;
}

std::unordered_map<std::string, std::string> ParseExceptions(std::istream& in) {
  std::unordered_map<std::string, std::string> table;
  for (const auto& line : ReadLines(in)) {
    std::istringstream fields(line);
    std::string form, lemma, extra;
    if (!(fields >> form >> lemma) || (fields >> extra)) {
      throw ValidationError("malformed lemma exception line: '" + line + "'");
    }
    table[form] = lemma;
  }
  return table;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return in;
}

}  // namespace

double CorpusStats::Fraction(std::string_view token) const {
  if (doc_count == 0) return 0.0;
  auto it = doc_freq.find(std::string(token));
  if (it == doc_freq.end()) return 0.0;
  return static_cast<double>(it->second) / static_cast<double>(doc_count);
}

Lexicon::Lexicon(std::unordered_set<std::string> stop_words,
                 std::unordered_map<std::string, std::string> exceptions)
    : stop_words_(std::move(stop_words)), exceptions_(std::move(exceptions)) {}

const Lexicon& Lexicon::Bundled() {
  static const Lexicon* const kLexicon = [] {
    std::istringstream stop(kBundledStopWords);
    std::istringstream exc(kBundledLemmaExceptions);
    return new Lexicon(ParseStopWords(stop), ParseExceptions(exc));
  }();
  return *kLexicon;
}

Lexicon Lexicon::FromFiles(const std::filesystem::path& stop_words,
                           const std::filesystem::path& exceptions) {
  auto stop = OpenOrThrow(stop_words);
  auto exc = OpenOrThrow(exceptions);
  return Lexicon(ParseStopWords(stop), ParseExceptions(exc));
}

bool Lexicon::IsStopWord(std::string_view token) const {
  return stop_words_.contains(std::string(token));
}

std::string Lexicon::ApplyOneRule(const std::string& token) const {
  if (auto it = exceptions_.find(token); it != exceptions_.end()) {
    return it->second;
  }
  auto fix_stem = [](std::string stem) {
    const std::size_t n = stem.size();
    if (n >= 2 && stem[n - 1] == stem[n - 2] && !IsVowel(stem[n - 1]) &&
        stem[n - 1] != 'l' && stem[n - 1] != 's' && stem[n - 1] != 'z') {
      stem.pop_back();
    } else if (n == 3 && !IsVowel(stem[0]) && IsVowel(stem[1]) &&
               !IsVowel(stem[2]) && stem[2] != 'w' && stem[2] != 'x' &&
               stem[2] != 'y') {
      stem.push_back('e');
    }
    return stem;
  };

  std::string candidate = token;
  const std::string_view t = token;
  if (EndsWith(t, "ies") && t.size() > 4) {
    candidate = token.substr(0, t.size() - 3) + "y";
  } else if (EndsWith(t, "sses")) {
    candidate = token.substr(0, t.size() - 2);
  } else if (t.size() > 4 && (EndsWith(t, "xes") || EndsWith(t, "ches") ||
                              EndsWith(t, "shes") || EndsWith(t, "zzes"))) {
    candidate = token.substr(0, t.size() - 2);
  } else if (EndsWith(t, "s") && t.size() > 3 && !EndsWith(t, "ss") &&
             !EndsWith(t, "us") && !EndsWith(t, "is")) {
    candidate = token.substr(0, t.size() - 1);
  } else if (EndsWith(t, "ing") && t.size() >= 6 &&
             HasVowel(t.substr(0, t.size() - 3))) {
    candidate = fix_stem(token.substr(0, t.size() - 3));
  } else if (EndsWith(t, "ed") && !EndsWith(t, "eed") && t.size() >= 5 &&
             HasVowel(t.substr(0, t.size() - 2))) {
    candidate = fix_stem(token.substr(0, t.size() - 2));
  }
  if (candidate.size() < 2 || IsStopWord(candidate)) return token;
  return candidate;
}

std::string Lexicon::Lemmatize(std::string_view token) const {
  std::string current(token);
  for (int i = 0; i < 8; ++i) {
    std::string next = ApplyOneRule(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() &&
           std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t end = i;
    while (end < text.size() &&
           !std::isspace(static_cast<unsigned char>(text[end]))) {
      ++end;
    }
    std::string chunk(text.substr(i, end - i));
    i = end;
    for (char& c : chunk) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (chunk.empty() || IsUrlChunk(chunk)) continue;
    std::string token;
    for (char c : chunk) {
      if (IsWordChar(static_cast<unsigned char>(c))) {
        token.push_back(c);
      } else if (!token.empty()) {
        tokens.push_back(std::move(token));
        token.clear();
      }
    }
    if (!token.empty()) tokens.push_back(std::move(token));
  }
  return tokens;
}

CorpusStats BuildCorpusStats(std::span<const std::string> docs) {
  if (docs.empty()) throw ValidationError("corpus is empty");
  CorpusStats stats;
  stats.doc_count = docs.size();
  for (const std::string& doc : docs) {
    std::vector<std::string> tokens = Tokenize(doc);
    std::unordered_set<std::string> seen(tokens.begin(), tokens.end());
    for (const auto& token : seen) ++stats.doc_freq[token];
  }
  return stats;
}

TokenDoc Preprocess(std::string_view text, const CorpusStats& stats,
                    const Lexicon& lexicon) {
  TokenDoc doc;
  auto keep = [&](const std::string& token) {
    return !lexicon.IsStopWord(token) &&
           stats.Fraction(token) <= kMaxDocumentFraction;
  };
  for (const std::string& token : Tokenize(text)) {
    if (!keep(token)) continue;
    std::string lemma = lexicon.Lemmatize(token);
    if (lemma != token && !keep(lemma)) continue;
    doc.tokens.push_back(std::move(lemma));
  }
  return doc;
}

HashedEmbeddingProvider::HashedEmbeddingProvider(int dimension,
                                                 std::uint64_t salt)
    : dimension_(dimension), salt_(salt) {
  if (dimension < 1) throw ValidationError("embedding dimension must be >= 1");
}

Vector HashedEmbeddingProvider::Embed(std::string_view token) const {
  {
    std::shared_lock lock(mu_);
    auto it = cache_.find(std::string(token));
    if (it != cache_.end()) return it->second;
  }
  StreamRng rng(DeriveSeed(HashString(token), salt_));
  Vector v(dimension_);
  for (int i = 0; i < dimension_; ++i) v[i] = StandardNormal(rng);
  v.normalize();
  std::unique_lock lock(mu_);
  cache_.emplace(std::string(token), v);
  return v;
}

TableEmbeddingProvider::TableEmbeddingProvider(
    std::unordered_map<std::string, Vector> table)
    : table_(std::move(table)), fallback_(DimensionOf(table_)) {}

int TableEmbeddingProvider::DimensionOf(
    const std::unordered_map<std::string, Vector>& t) {
  if (t.empty()) return HashedEmbeddingProvider::kDefaultDimension;
  const auto dim = t.begin()->second.size();
  for (const auto& [token, v] : t) {
    if (v.size() != dim) {
      throw ValidationError("embedding table has mixed dimensions (token '" +
                            token + "')");
    }
  }
  return static_cast<int>(dim);
}

Vector TableEmbeddingProvider::Embed(std::string_view token) const {
  auto it = table_.find(std::string(token));
  if (it != table_.end()) return it->second;
  return fallback_.Embed(token);
}

DocVector Embed(const TokenDoc& doc, const EmbeddingProvider& provider) {
  const int dim = provider.dimension();
  DocVector sum = DocVector::Zero(dim);
  if (doc.tokens.empty()) return sum;
  for (const auto& token : doc.tokens) {
    Vector v = provider.Embed(token);
    if (v.size() != dim) {
      throw ValidationError("embedding provider returned dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(dim));
    }
    sum += v;
  }
  return sum / static_cast<double>(doc.tokens.size());
}

}  // namespace sockaudit
