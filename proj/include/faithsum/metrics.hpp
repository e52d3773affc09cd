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

// ROUGE-N / ROUGE-L (clipped counts, no stemming) and Flesch Reading Ease.

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faithsum/error.hpp"
#include "faithsum/textproc.hpp"

namespace faithsum {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PrfScore from(double p, double r) { return {p, r, p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0}; }
  bool operator==(const PrfScore&) const = default;
};

namespace detail {

struct SpanLess {
  template <class T>
  bool operator()(std::span<const T> a, std::span<const T> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

template <class T>
using NgramCounts = std::map<std::span<const T>, int, SpanLess>;

template <class T>
NgramCounts<T> ngram_counts(std::span<const T> seq, std::size_t n) {
  NgramCounts<T> counts;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) ++counts[seq.subspan(i, n)];
  return counts;
}

}  // namespace detail

// Clipped n-gram overlap: each reference n-gram matches at most as many
// times as it occurs in the reference.
template <class T>
PrfScore rouge_n(std::span<const T> candidate, std::span<const T> reference, std::size_t n) {
  if (n == 0) throw ConfigError("rouge_n: n must be >= 1");
  if (candidate.size() < n || reference.size() < n) return {};
  const auto cand = detail::ngram_counts(candidate, n);
  const auto ref = detail::ngram_counts(reference, n);
  long overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const double p = static_cast<double>(overlap) / static_cast<double>(candidate.size() - n + 1);
  const double r = static_cast<double>(overlap) / static_cast<double>(reference.size() - n + 1);
  return PrfScore::from(p, r);
}

template <class T>
std::size_t lcs_length(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <class T>
PrfScore rouge_l(std::span<const T> candidate, std::span<const T> reference) {
  if (candidate.empty() || reference.empty()) return {};
  const double l = static_cast<double>(lcs_length(candidate, reference));
  return PrfScore::from(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

inline PrfScore rouge_n(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, std::size_t n) {
  return rouge_n(std::span<const std::string>(candidate), std::span<const std::string>(reference), n);
}

inline PrfScore rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  return rouge_l(std::span<const std::string>(candidate), std::span<const std::string>(reference));
}

struct RougeScores {
  PrfScore r1, r2, rl;
};

// ROUGE-1/2/L over the word tokens of two texts.
inline RougeScores rouge_text(std::string_view candidate, std::string_view reference, Language lang) {
  const auto c = word_forms(tokenize(candidate, lang));
  const auto r = word_forms(tokenize(reference, lang));
  return {rouge_n(c, r, 1), rouge_n(c, r, 2), rouge_l(c, r)};
}

struct ReadabilityCounts {
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t syllables = 0;
};

inline ReadabilityCounts readability_counts(std::string_view text, const WordList& abbreviations = builtin_abbreviations()) {
  ReadabilityCounts c;
  for (const auto& s : segment_sentences(text, Language::English, abbreviations)) {
    bool any_word = false;
    for (const auto& t : tokenize(s.text, Language::English)) {
      if (!t.is_word) continue;
      any_word = true;
      ++c.words;
      c.syllables += static_cast<std::size_t>(count_syllables(t.surface));
    }
    if (any_word) ++c.sentences;
  }
  return c;
}

// Flesch Reading Ease, unclamped. English only.
inline double fre(std::string_view text, const WordList& abbreviations = builtin_abbreviations()) {
  const auto c = readability_counts(text, abbreviations);
  if (c.words == 0) throw DataError("fre: text has no words");
  return 206.835 - 1.015 * (static_cast<double>(c.words) / static_cast<double>(c.sentences)) -
         84.6 * (static_cast<double>(c.syllables) / static_cast<double>(c.words));
}

}  // namespace faithsum
