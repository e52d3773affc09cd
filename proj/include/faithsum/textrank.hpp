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

#pragma once

// TextRank over question sentences: lexical-overlap similarity graph,
// weighted PageRank by power iteration, and context selection.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "faithsum/error.hpp"
#include "faithsum/medner.hpp"
#include "faithsum/textproc.hpp"

namespace faithsum {

// Dense symmetric weight matrix with a zero diagonal.
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  explicit SimilarityGraph(std::size_t n) : n_(n), w_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }

  // Sets both (i, j) and (j, i). Diagonal writes and invalid weights are rejected.
  void set_weight(std::size_t i, std::size_t j, double w) {
    if (i == j) throw ConfigError("similarity graph diagonal must stay zero");
    if (!std::isfinite(w) || w < 0.0) throw ConfigError("similarity weight must be finite and non-negative");
    w_[i * n_ + j] = w;
    w_[j * n_ + i] = w;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
};

template <class G>
concept WeightedGraph = requires(const G& g, std::size_t i) {
  { g.size() } -> std::convertible_to<std::size_t>;
  { g.weight(i, i) } -> std::convertible_to<double>;
};

struct TextRankParams {
  double damping = 0.85;
  double epsilon = 1e-6;
  int max_iterations = 100;

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("textrank damping must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("textrank epsilon must be positive");
    if (max_iterations < 1) throw ConfigError("textrank max_iterations must be >= 1");
  }
};

struct RankResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;
};

// weight(i, j) = |shared distinct non-stopword forms| / (ln|Si| + ln|Sj|),
// where |S| counts all word tokens; 0 when either sentence has <= 1 word.
inline SimilarityGraph build_similarity_graph(const std::vector<std::vector<Token>>& sentences, const WordList& stopwords) {
  const std::size_t n = sentences.size();
  SimilarityGraph g(n);
  std::vector<std::set<std::string>> content(n);
  std::vector<std::size_t> length(n);
  for (std::size_t i = 0; i < n; ++i) {
    length[i] = count_words(sentences[i]);
    for (const auto& t : sentences[i])
      if (t.is_word && !stopwords.contains(t.normalized)) content[i].insert(t.normalized);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (length[i] <= 1 || length[j] <= 1) continue;
      std::size_t overlap = 0;
      for (const auto& w : content[i]) overlap += content[j].count(w);
      if (overlap == 0) continue;
      const double denom = std::log(static_cast<double>(length[i])) + std::log(static_cast<double>(length[j]));
      g.set_weight(i, j, static_cast<double>(overlap) / denom);
    }
  }
  return g;
}

// Synchronous power iteration of
//   s_i <- (1 - d) + d * sum_j (w_ji / out_j) * s_j
// from s = 1, skipping vertices with zero out-weight. Stops when the
// largest per-vertex change drops below epsilon.
template <WeightedGraph G>
RankResult rank(const G& graph, const TextRankParams& params = {}) {
  params.validate();
  const std::size_t n = graph.size();
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) out_weight[j] += graph.weight(j, k);

  RankResult r;
  r.scores.assign(n, 1.0);
  std::vector<double> next(n);
  const double d = params.damping;
  while (r.iterations < params.max_iterations) {
    double max_delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double incoming = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (out_weight[j] <= 0.0) continue;
        const double w = graph.weight(j, i);
        if (w != 0.0) incoming += w / out_weight[j] * r.scores[j];
      }
      next[i] = (1.0 - d) + d * incoming;
      max_delta = std::max(max_delta, std::abs(next[i] - r.scores[i]));
    }
    r.scores.swap(next);
    ++r.iterations;
    if (max_delta < params.epsilon) {
      r.converged = true;
      break;
    }
  }
  return r;
}

enum class SelectionReason { EntityBearing, QueryTerm, RankTopUp };

inline std::string_view to_string(SelectionReason r) {
  switch (r) {
    case SelectionReason::EntityBearing: return "entity-bearing";
    case SelectionReason::QueryTerm: return "query-term";
    case SelectionReason::RankTopUp: return "rank-top-up";
  }
  return "?";
}

struct ExtractiveContext {
  std::vector<std::size_t> selected;         // ascending sentence indices
  std::vector<SelectionReason> reasons;      // parallel to `selected`
  std::vector<double> scores;                // one per source sentence
};

inline std::size_t default_context_budget(std::size_t n_sentences) {
  return std::max<std::size_t>(3, (n_sentences + 1) / 2);
}

inline bool is_interrogative_sentence(const SentenceSpan& s) {
  return s.text.ends_with("?") || s.text.ends_with("?\"") || s.text.ends_with("?)") || s.text.ends_with("？");
}

// Query terms: the interrogative word list plus every non-stopword word of
// the last sentence that ends in a question mark.
inline WordList query_terms(const std::vector<SentenceSpan>& sentences, const std::vector<std::vector<Token>>& tokens,
                            const WordList& interrogatives, const WordList& stopwords) {
  WordList terms = interrogatives;
  for (std::size_t i = sentences.size(); i > 0; --i) {
    if (!is_interrogative_sentence(sentences[i - 1])) continue;
    for (const auto& t : tokens[i - 1])
      if (t.is_word && !stopwords.contains(t.normalized)) terms.entries.insert(t.normalized);
    break;
  }
  return terms;
}

// Mandatory sentences carry an entity mention or a query term. Too many
// mandatory sentences are cut to the k best-ranked; too few are topped up
// from the remaining best-ranked. Ties go to the earlier sentence.
inline ExtractiveContext select_context(const std::vector<std::vector<Token>>& sentence_tokens,
                                        const std::vector<double>& scores,
                                        const std::vector<EntityMention>& mentions, const WordList& query,
                                        std::size_t budget) {
  const std::size_t n = sentence_tokens.size();
  if (n == 0) throw ConfigError("select_context: empty sentence list");
  if (budget == 0) throw ConfigError("select_context: budget must be positive");
  if (scores.size() != n) throw ConfigError("select_context: score count does not match sentence count");

  std::vector<bool> has_entity(n, false), has_query(n, false);
  for (const auto& m : mentions) {
    if (m.sentence_index >= n) throw ConfigError("select_context: mention sentence index out of range");
    has_entity[m.sentence_index] = true;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& t : sentence_tokens[i])
      if (t.is_word && query.contains(t.normalized)) {
        has_query[i] = true;
        break;
      }

  auto by_rank = [&](std::size_t a, std::size_t b) { return scores[a] > scores[b] || (scores[a] == scores[b] && a < b); };
  std::vector<std::size_t> mandatory, rest;
  for (std::size_t i = 0; i < n; ++i) (has_entity[i] || has_query[i] ? mandatory : rest).push_back(i);
  std::stable_sort(mandatory.begin(), mandatory.end(), by_rank);
  std::stable_sort(rest.begin(), rest.end(), by_rank);

  std::vector<std::size_t> chosen(mandatory.begin(), mandatory.begin() + static_cast<std::ptrdiff_t>(std::min(budget, mandatory.size())));
  for (std::size_t i = 0; i < rest.size() && chosen.size() < budget; ++i) chosen.push_back(rest[i]);
  std::sort(chosen.begin(), chosen.end());

  ExtractiveContext ctx;
  ctx.scores = scores;
  ctx.selected = chosen;
  for (auto i : chosen)
    ctx.reasons.push_back(has_entity[i] ? SelectionReason::EntityBearing
                          : has_query[i] ? SelectionReason::QueryTerm
                                         : SelectionReason::RankTopUp);
  return ctx;
}

}  // namespace faithsum
