// Copyright 2026 The faithsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "faithsum/textrank.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace faithsum {
namespace {

std::vector<std::vector<Token>> tokens_of(const std::vector<std::string>& sentences) {
  std::vector<std::vector<Token>> out;
  for (const auto& s : sentences) out.push_back(tokenize(s, Language::English));
  return out;
}

std::vector<std::vector<double>> dense(const SimilarityGraph& g) {
  std::vector<std::vector<double>> w(g.size(), std::vector<double>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) w[i][j] = g.weight(i, j);
  return w;
}

SimilarityGraph random_graph(std::mt19937_64& rng, std::size_t n) {
  SimilarityGraph g(n);
  std::uniform_real_distribution<double> weight(0.0, 3.0);
  std::bernoulli_distribution edge(0.5);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (edge(rng)) g.set_weight(i, j, weight(rng));
  return g;
}

TEST(Graph, IdenticalFourWordSentences) {
  auto g = build_similarity_graph(tokens_of({"aspirin causes stomach bleeding", "aspirin causes stomach bleeding"}), WordList{});
  EXPECT_NEAR(g.weight(0, 1), 4.0 / (2.0 * std::log(4.0)), 1e-12);
  EXPECT_NEAR(g.weight(0, 1), 1.4427, 1e-4);
  EXPECT_EQ(g.weight(0, 0), 0.0);
}

TEST(Graph, StopwordsExcludedFromOverlapButCountedInLength) {
  auto sw = make_word_list({"the", "is"}, Language::English);
  auto g = build_similarity_graph(tokens_of({"the fever is high", "the fever is gone today"}), sw);
  EXPECT_NEAR(g.weight(0, 1), 1.0 / (std::log(4.0) + std::log(5.0)), 1e-12);
}

TEST(Graph, NoSharedTokensAndSingleSentence) {
  auto g = build_similarity_graph(tokens_of({"fever and chills", "rash on arms"}), WordList{});
  EXPECT_EQ(g.weight(0, 1), 0.0);
  auto one = build_similarity_graph(tokens_of({"only one sentence here"}), WordList{});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.weight(0, 0), 0.0);
}

TEST(Graph, OneWordSentenceHasNoEdges) {
  auto g = build_similarity_graph(tokens_of({"fever", "fever fever"}), WordList{});
  EXPECT_EQ(g.weight(0, 1), 0.0);
}

TEST(Graph, RejectsDiagonalAndInvalidWeights) {
  SimilarityGraph g(3);
  EXPECT_THROW(g.set_weight(1, 1, 1.0), ConfigError);
  EXPECT_THROW(g.set_weight(0, 1, -0.5), ConfigError);
  EXPECT_THROW(g.set_weight(0, 1, std::nan("")), ConfigError);
  g.set_weight(0, 2, 0.25);
  EXPECT_EQ(g.weight(2, 0), 0.25);
}

TEST(Graph, SymmetricWithZeroDiagonalOnRandomText) {
  const std::vector<std::string> vocab = {"fever", "aspirin", "the", "pain", "is", "chest", "dose", "child"};
  std::mt19937_64 rng(17);
  auto sw = make_word_list({"the", "is"}, Language::English);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> sentences;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i) {
      std::string s;
      for (int k = 0, m = static_cast<int>(rng() % 7); k < m; ++k) s += vocab[rng() % vocab.size()] + " ";
      sentences.push_back(s);
    }
    auto g = build_similarity_graph(tokens_of(sentences), sw);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g.weight(i, i), 0.0);
      for (std::size_t j = 0; j < g.size(); ++j) {
        EXPECT_EQ(g.weight(i, j), g.weight(j, i));
        EXPECT_TRUE(std::isfinite(g.weight(i, j)) && g.weight(i, j) >= 0.0);
      }
    }
  }
}

TEST(Rank, DisconnectedGraph) {
  auto r = rank(SimilarityGraph(3));
  for (double s : r.scores) EXPECT_DOUBLE_EQ(s, 0.15);
  EXPECT_TRUE(r.converged);
}

TEST(Rank, CompleteEqualWeightsGiveEqualScores) {
  SimilarityGraph g(5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) g.set_weight(i, j, 0.7);
  auto r = rank(g);
  for (double s : r.scores) EXPECT_EQ(s, r.scores[0]);
  EXPECT_NEAR(r.scores[0], 1.0, 1e-12);
}

TEST(Rank, WeightedPathMatchesDenseSolve) {
  SimilarityGraph g(3);
  g.set_weight(0, 1, 1.0);
  g.set_weight(1, 2, 2.0);
  TextRankParams p;
  p.epsilon = 1e-10;
  p.max_iterations = 1000;
  auto r = rank(g, p);
  auto expected = oracle::textrank_fixed_point(dense(g), 0.85);
  ASSERT_TRUE(r.converged);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.scores[i], expected[i], 1e-8);
}

TEST(Rank, RandomGraphsMatchDenseSolveAndInvariants) {
  std::mt19937_64 rng(2024);
  TextRankParams p;
  p.epsilon = 1e-10;
  p.max_iterations = 1000;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    auto g = random_graph(rng, n);
    auto r = rank(g, p);
    auto expected = oracle::textrank_fixed_point(dense(g), p.damping);
    EXPECT_LE(r.iterations, p.max_iterations);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(r.scores[i], expected[i], 1e-6);
      EXPECT_GE(r.scores[i], 1.0 - p.damping - 1e-9);
      EXPECT_TRUE(std::isfinite(r.scores[i]));
    }

    const double scale = std::uniform_real_distribution<double>(0.01, 100.0)(rng);
    SimilarityGraph scaled(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (g.weight(i, j) > 0.0) scaled.set_weight(i, j, g.weight(i, j) * scale);
    auto rs = rank(scaled, p);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(rs.scores[i], r.scores[i], 1e-9);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    SimilarityGraph permuted(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (g.weight(i, j) > 0.0) permuted.set_weight(perm[i], perm[j], g.weight(i, j));
    auto rp = rank(permuted, p);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(rp.scores[perm[i]], r.scores[i], 1e-9);
  }
}

TEST(Rank, IterationCap) {
  std::mt19937_64 rng(1);
  auto g = random_graph(rng, 8);
  TextRankParams p;
  p.epsilon = 1e-300;
  p.max_iterations = 7;
  auto r = rank(g, p);
  EXPECT_EQ(r.iterations, 7);
  EXPECT_FALSE(r.converged);
}

TEST(Rank, ParamsValidated) {
  SimilarityGraph g(2);
  EXPECT_THROW(rank(g, TextRankParams{1.0, 1e-6, 10}), ConfigError);
  EXPECT_THROW(rank(g, TextRankParams{0.85, 0.0, 10}), ConfigError);
  EXPECT_THROW(rank(g, TextRankParams{0.85, 1e-6, 0}), ConfigError);
}

EntityMention mention_in(std::size_t sentence) {
  EntityMention m;
  m.canonical_id = "x";
  m.sentence_index = sentence;
  return m;
}

TEST(Select, EntitiesPlusTopUp) {
  auto tokens = tokens_of({"s0", "s1", "s2", "s3", "s4"});
  std::vector<double> scores = {0.9, 0.2, 0.5, 0.3, 0.4};
  auto ctx = select_context(tokens, scores, {mention_in(1), mention_in(3)}, WordList{}, 3);
  EXPECT_EQ(ctx.selected, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(ctx.reasons, (std::vector<SelectionReason>{SelectionReason::RankTopUp, SelectionReason::EntityBearing,
                                                        SelectionReason::EntityBearing}));
}

TEST(Select, CapKeepsBestRankedMandatory) {
  auto tokens = tokens_of({"a", "b", "c", "d"});
  std::vector<double> scores = {0.1, 0.4, 0.3, 0.4};
  auto ctx = select_context(tokens, scores, {mention_in(0), mention_in(1), mention_in(2), mention_in(3)}, WordList{}, 2);
  EXPECT_EQ(ctx.selected, (std::vector<std::size_t>{1, 3}));
}

TEST(Select, NoMandatoryMatchesExhaustiveArgmax) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<std::string> sentences(n, "plain sentence");
    std::vector<double> scores(n);
    for (auto& s : scores) s = static_cast<double>(rng() % 4) / 4.0;  // frequent ties
    const std::size_t k = 1 + rng() % 4;
    auto ctx = select_context(tokens_of(sentences), scores, {}, WordList{}, k);
    // Best k-subset by (sum of scores, then lexicographically smallest indices).
    std::vector<std::size_t> best;
    double best_sum = -1.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != std::min(k, n)) continue;
      std::vector<std::size_t> subset;
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (1u << i)) {
          subset.push_back(i);
          sum += scores[i];
        }
      if (sum > best_sum || (sum == best_sum && subset < best)) {
        best = subset;
        best_sum = sum;
      }
    }
    EXPECT_EQ(ctx.selected, best);
  }
}

TEST(Select, Errors) {
  EXPECT_THROW(select_context({}, {}, {}, WordList{}, 3), ConfigError);
  EXPECT_THROW(select_context(tokens_of({"a"}), {1.0}, {}, WordList{}, 0), ConfigError);
}

TEST(Select, QueryTermsFromFinalQuestion) {
  std::vector<std::string> text = {"My knee hurts.", "I run a lot.", "Is ibuprofen safe for knee swelling?",
                                   "Thanks."};
  std::vector<SentenceSpan> spans;
  for (std::size_t i = 0; i < text.size(); ++i) spans.push_back({i, text[i], 0, text[i].size()});
  auto tokens = tokens_of(text);
  auto interrogatives = make_word_list({"what", "is"}, Language::English);
  auto stop = make_word_list({"is", "for", "i", "a", "my"}, Language::English);
  auto q = query_terms(spans, tokens, interrogatives, stop);
  EXPECT_TRUE(q.contains("knee"));
  EXPECT_TRUE(q.contains("swelling"));
  EXPECT_TRUE(q.contains("is"));
  EXPECT_FALSE(q.contains("run"));
  auto ctx = select_context(tokens, {0.1, 0.9, 0.2, 0.8}, {}, q, 2);
  EXPECT_EQ(ctx.selected, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(ctx.reasons[0], SelectionReason::QueryTerm);
}

TEST(Select, EveryEntitySentenceKeptUnlessCapped) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<std::string> sentences(n, "words here");
    std::vector<double> scores(n);
    for (auto& s : scores) s = std::uniform_real_distribution<double>(0.15, 2.0)(rng);
    std::vector<EntityMention> mentions;
    for (std::size_t i = 0; i < n; ++i)
      if (rng() % 3 == 0) mentions.push_back(mention_in(i));
    const std::size_t k = default_context_budget(n);
    auto ctx = select_context(tokens_of(sentences), scores, mentions, WordList{}, k);
    EXPECT_TRUE(std::is_sorted(ctx.selected.begin(), ctx.selected.end()));
    EXPECT_EQ(std::adjacent_find(ctx.selected.begin(), ctx.selected.end()), ctx.selected.end());
    EXPECT_EQ(ctx.selected.size(), std::min(k, n));
    std::set<std::size_t> entity_sentences;
    for (const auto& m : mentions) entity_sentences.insert(m.sentence_index);
    if (entity_sentences.size() <= k)
      for (auto i : entity_sentences) EXPECT_TRUE(std::binary_search(ctx.selected.begin(), ctx.selected.end(), i));
    auto again = select_context(tokens_of(sentences), scores, mentions, WordList{}, k);
    EXPECT_EQ(again.selected, ctx.selected);
  }
}

TEST(Select, DefaultBudget) {
  EXPECT_EQ(default_context_budget(1), 3u);
  EXPECT_EQ(default_context_budget(6), 3u);
  EXPECT_EQ(default_context_budget(7), 4u);
  EXPECT_EQ(default_context_budget(10), 5u);
}

}  // namespace
}  // namespace faithsum
