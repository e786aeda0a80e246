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

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "sockaudit/rng.h"

namespace sockaudit {
namespace {

using Tokens = std::vector<std::string>;

CorpusStats Stats(std::vector<std::string> docs) {
  return BuildCorpusStats(docs);
}

TEST(CorpusStatsTest, CountsDocumentsNotOccurrences) {
  const CorpusStats s = Stats({"a b", "a c a"});
  EXPECT_EQ(s.doc_count, 2u);
  EXPECT_EQ(s.doc_freq.at("a"), 2u);
  EXPECT_EQ(s.doc_freq.at("b"), 1u);
  EXPECT_EQ(s.doc_freq.at("c"), 1u);
  EXPECT_DOUBLE_EQ(s.Fraction("a"), 1.0);
  EXPECT_DOUBLE_EQ(s.Fraction("zzz"), 0.0);
}

TEST(CorpusStatsTest, SingleDocument) {
  const CorpusStats s = Stats({"x y z"});
  for (const auto& [token, df] : s.doc_freq) EXPECT_EQ(df, 1u) << token;
}

TEST(CorpusStatsTest, EmptyCorpusThrows) {
  EXPECT_THROW(Stats({}), ValidationError);
}

TEST(PreprocessTest, FrequentTokenRemoved) {
  std::vector<std::string> docs;
  for (int i = 0; i < 100; ++i) {
    docs.push_back(i < 80 ? "zebra token" + std::to_string(i)
                          : "token" + std::to_string(i));
  }
  const CorpusStats s = BuildCorpusStats(docs);
  EXPECT_EQ(s.doc_freq.at("zebra"), 80u);
  EXPECT_EQ(Preprocess("zebra quagga", s).tokens, Tokens{"quagga"});
}

TEST(PreprocessTest, UrlDroppedCaseFoldedNoDedup) {
  const CorpusStats s = Stats({"now", "other", "more"});
  EXPECT_EQ(Preprocess("Visit https://x.y NOW now", s).tokens,
            (Tokens{"now", "now"}));
}

TEST(PreprocessTest, EmptyText) {
  const CorpusStats s = Stats({"x"});
  EXPECT_TRUE(Preprocess("", s).tokens.empty());
}

TEST(PreprocessTest, Lemmatizes) {
  const CorpusStats s = Stats({"a", "b", "c"});
  EXPECT_EQ(Preprocess("cats running faster", s).tokens,
            (Tokens{"cat", "run", "fast"}));
}

TEST(PreprocessTest, IdempotentOnRandomText) {
  static const char* const kWords[] = {
      "the",     "running", "cats",   "studies", "classes", "buses",
      "watched", "boxes",   "making", "hopped",  "stories", "news",
      "series",  "ran",     "going",  "sunsets", "www.x.com", "http://a.b",
      "Eclipse", "ECLIPSES", "it's",  "children", "faster", "subscribe"};
  StreamRng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    for (int k = 0; k < 12; ++k) {
      text += kWords[UniformIndex(rng, std::size(kWords))];
      text += UniformIndex(rng, 3) == 0 ? ", " : " ";
    }
    const CorpusStats s = Stats({text, "unrelated words", "more words here"});
    const TokenDoc once = Preprocess(text, s);
    std::string joined;
    for (const auto& t : once.tokens) joined += t + " ";
    EXPECT_EQ(Preprocess(joined, s), once) << text;
  }
}

TEST(TokenizeTest, SplitsOnPunctuationAndDropsUrls) {
  EXPECT_EQ(Tokenize("Hello, World! www.example.com/x foo-bar"),
            (Tokens{"hello", "world", "foo", "bar"}));
}

TEST(LexiconTest, SuffixRulesAndExceptions) {
  const Lexicon& lex = Lexicon::Bundled();
  EXPECT_EQ(lex.Lemmatize("cats"), "cat");
  EXPECT_EQ(lex.Lemmatize("studies"), "study");
  EXPECT_EQ(lex.Lemmatize("classes"), "class");
  EXPECT_EQ(lex.Lemmatize("boxes"), "box");
  EXPECT_EQ(lex.Lemmatize("running"), "run");
  EXPECT_EQ(lex.Lemmatize("making"), "make");
  EXPECT_EQ(lex.Lemmatize("ran"), "run");
  EXPECT_EQ(lex.Lemmatize("children"), "child");
  EXPECT_EQ(lex.Lemmatize("news"), "news");
  EXPECT_TRUE(lex.IsStopWord("the"));
  EXPECT_TRUE(lex.IsStopWord("subscribe"));
  EXPECT_FALSE(lex.IsStopWord("now"));
}

TEST(EmbedTest, SingleTokenIsProviderVector) {
  const HashedEmbeddingProvider provider;
  const Vector v = provider.Embed("eclipse");
  EXPECT_EQ(Embed(TokenDoc{{"eclipse"}}, provider), v);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
}

TEST(EmbedTest, EmptyDocIsZero) {
  const HashedEmbeddingProvider provider(8);
  const DocVector v = Embed(TokenDoc{}, provider);
  EXPECT_EQ(v.size(), 8);
  EXPECT_EQ(v.norm(), 0.0);
}

TEST(EmbedTest, TwoTokensMean) {
  const HashedEmbeddingProvider provider(16);
  const Vector a = provider.Embed("solar");
  const Vector b = provider.Embed("eclipse");
  const DocVector m = Embed(TokenDoc{{"solar", "eclipse"}}, provider);
  for (int i = 0; i < 16; ++i) EXPECT_NEAR(m[i], (a[i] + b[i]) / 2.0, 1e-15);
}

TEST(EmbedTest, TableProviderWithFallback) {
  Vector x(2);
  x << 1.0, 0.0;
  const TableEmbeddingProvider provider({{"known", x}});
  EXPECT_EQ(provider.Embed("known"), x);
  EXPECT_EQ(provider.Embed("other").size(), 2);
}

TEST(DocSimTest, Identities) {
  Vector v(3);
  v << 1.0, 2.0, 3.0;
  EXPECT_NEAR(DocSim(v, v), 1.0, 1e-15);
  Vector e1(2), e2(2);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  EXPECT_EQ(DocSim(e1, e2), 0.0);
  Vector d(2);
  d << 1.0, 1.0;
  EXPECT_NEAR(DocSim(e1, d), 0.70710678118654752, 1e-9);
  EXPECT_EQ(DocSim(Vector::Zero(2), d), 0.0);
}

TEST(DocSimTest, DimensionMismatchThrows) {
  EXPECT_THROW(DocSim(Vector::Ones(2), Vector::Ones(3)), ValidationError);
}

}  // namespace
}  // namespace sockaudit
