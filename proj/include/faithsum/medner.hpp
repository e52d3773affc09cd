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

// Gazetteer medical entity tagging with NegEx-style negation scoping.

#include <algorithm>
#include <filesystem>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "faithsum/error.hpp"
#include "faithsum/io.hpp"
#include "faithsum/textproc.hpp"

namespace faithsum {

using TokenKey = std::vector<std::string>;

// Phrase table over normalized token sequences (punctuation included, so
// "x-ray" only matches x - ray).
class PhraseTable {
 public:
  // Returns false when the key is already present (first entry wins).
  bool insert(TokenKey key, std::string value) {
    if (key.empty()) return false;
    max_len_ = std::max(max_len_, key.size());
    return entries_.emplace(std::move(key), std::move(value)).second;
  }

  // Length of the longest entry matching tokens[pos..], 0 when none.
  std::size_t longest_match(const std::vector<Token>& tokens, std::size_t pos, const std::string** value = nullptr) const {
    const std::size_t limit = std::min(max_len_, tokens.size() - pos);
    TokenKey key;
    key.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) key.push_back(tokens[pos + i].normalized);
    for (std::size_t len = limit; len > 0; --len) {
      key.resize(len);
      auto it = entries_.find(key);
      if (it != entries_.end()) {
        if (value) *value = &it->second;
        return len;
      }
    }
    return 0;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_length() const { return max_len_; }
  const std::map<TokenKey, std::string>& entries() const { return entries_; }

 private:
  std::map<TokenKey, std::string> entries_;
  std::size_t max_len_ = 0;
};

struct Gazetteer {
  PhraseTable entries;  // surface tokens -> canonical id
  std::string source_name;
  std::string version = "unversioned";
  Language language = Language::English;
};

struct NegationLexicon {
  PhraseTable triggers;  // trigger tokens -> trigger text
  Language language = Language::English;
};

struct EntityMention {
  std::string canonical_id;
  std::string surface;
  std::size_t sentence_index = 0;
  std::size_t token_start = 0;  // into the sentence's full token sequence
  std::size_t token_end = 0;    // exclusive
  bool negated = false;

  bool operator==(const EntityMention&) const = default;
};

struct Lexicons {
  Gazetteer gazetteer;
  NegationLexicon negation;
  std::vector<std::string> warnings;
};

inline TokenKey phrase_key(std::string_view phrase, Language lang) {
  TokenKey key;
  for (auto& t : tokenize(unicode::to_nfc(phrase), lang)) key.push_back(std::move(t.normalized));
  return key;
}

inline Gazetteer load_gazetteer(const std::filesystem::path& path, Language lang, std::vector<std::string>& warnings) {
  if (!std::filesystem::exists(path)) throw DataError("gazetteer file not found: " + path.string());
  Gazetteer g;
  g.source_name = path.filename().string();
  g.language = lang;
  g.version = io::sha256_hex(io::read_file(path)).substr(0, 12);
  std::size_t line_no = 0;
  for (const auto& raw : io::split_lines(io::read_file(path))) {
    ++line_no;
    auto line = io::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto bar = line.rfind('|');
    if (bar == std::string_view::npos) {
      warnings.push_back(g.source_name + ":" + std::to_string(line_no) + ": missing '|', skipped");
      continue;
    }
    auto key = phrase_key(io::trim(line.substr(0, bar)), lang);
    auto id = std::string(io::trim(line.substr(bar + 1)));
    if (key.empty() || id.empty()) {
      warnings.push_back(g.source_name + ":" + std::to_string(line_no) + ": empty surface or id, skipped");
      continue;
    }
    if (!g.entries.insert(std::move(key), std::move(id)))
      warnings.push_back(g.source_name + ":" + std::to_string(line_no) + ": duplicate surface '" +
                         std::string(io::trim(line.substr(0, bar))) + "', first entry kept");
  }
  if (g.entries.empty()) throw DataError("gazetteer has no entries: " + path.string());
  return g;
}

inline NegationLexicon load_negation_lexicon(const std::filesystem::path& path, Language lang) {
  if (!std::filesystem::exists(path)) throw DataError("negation lexicon not found: " + path.string());
  NegationLexicon n;
  n.language = lang;
  for (const auto& phrase : io::read_list_file(path)) n.triggers.insert(phrase_key(phrase, lang), phrase);
  if (n.triggers.empty()) throw DataError("negation lexicon has no entries: " + path.string());
  return n;
}

inline Lexicons load_lexicons(const std::filesystem::path& gazetteer_path, const std::filesystem::path& negation_path,
                              Language lang) {
  Lexicons out;
  out.gazetteer = load_gazetteer(gazetteer_path, lang, out.warnings);
  out.negation = load_negation_lexicon(negation_path, lang);
  return out;
}

inline bool is_clause_boundary(const Token& t, Language lang) {
  if (t.normalized == "," || t.normalized == ";" || t.normalized == "،") return true;
  if (lang == Language::English) return t.normalized == "but";
  return t.normalized == "কিন্তু";
}

inline constexpr std::size_t kDefaultNegationWindow = 5;

// Left-to-right longest match over the sentence tokens. A mention is
// negated when a trigger ends fewer than `window` word tokens before it and
// no clause boundary (comma, semicolon, "but") lies in between. Bangla
// negators follow the verb, so for Bangla a trigger starting fewer than
// `window` word tokens after the mention also counts.
inline std::vector<EntityMention> tag_entities(const std::vector<Token>& tokens, const Gazetteer& gazetteer,
                                               const NegationLexicon& negation,
                                               std::size_t window = kDefaultNegationWindow,
                                               std::size_t sentence_index = 0) {
  std::vector<EntityMention> mentions;
  if (tokens.empty()) return mentions;

  // word_ordinal[i]: number of word tokens before token i.
  std::vector<std::size_t> word_ordinal(tokens.size() + 1, 0);
  for (std::size_t i = 0; i < tokens.size(); ++i) word_ordinal[i + 1] = word_ordinal[i] + (tokens[i].is_word ? 1 : 0);

  // Trigger token ranges, longest match, non-overlapping.
  std::vector<std::pair<std::size_t, std::size_t>> triggers;
  for (std::size_t i = 0; i < tokens.size();) {
    const std::size_t len = tokens[i].is_word ? negation.triggers.longest_match(tokens, i) : 0;
    if (len > 0) {
      triggers.emplace_back(i, i + len);
      i += len;
    } else {
      ++i;
    }
  }

  auto open_gap = [&](std::size_t from, std::size_t to) {
    if (word_ordinal[to] - word_ordinal[from] >= window) return false;
    for (std::size_t k = from; k < to; ++k)
      if (is_clause_boundary(tokens[k], negation.language)) return false;
    return true;
  };
  const bool look_ahead = negation.language == Language::Bangla;
  auto negated_at = [&](std::size_t start, std::size_t end) {
    for (auto it = triggers.rbegin(); it != triggers.rend(); ++it) {
      if (it->second > start) continue;
      if (open_gap(it->second, start)) return true;
      break;
    }
    if (look_ahead) {
      for (const auto& [t_start, t_end] : triggers) {
        if (t_start < end) continue;
        return open_gap(end, t_start);
      }
    }
    return false;
  };

  for (std::size_t i = 0; i < tokens.size();) {
    const std::string* id = nullptr;
    const std::size_t len = tokens[i].is_word ? gazetteer.entries.longest_match(tokens, i, &id) : 0;
    if (len == 0) {
      ++i;
      continue;
    }
    EntityMention m;
    m.canonical_id = *id;
    for (std::size_t k = i; k < i + len; ++k) {
      if (k > i && tokens[k].char_start > tokens[k - 1].char_end) m.surface.push_back(' ');
      m.surface += tokens[k].surface;
    }
    m.sentence_index = sentence_index;
    m.token_start = i;
    m.token_end = i + len;
    m.negated = negated_at(i, i + len);
    mentions.push_back(std::move(m));
    i += len;
  }
  return mentions;
}

using EntityKey = std::pair<std::string, bool>;  // (canonical id, negated)

struct OverlapReport {
  std::set<EntityKey> retained;
  std::set<EntityKey> lost;
  std::set<EntityKey> hallucinated;
  std::size_t source_keys = 0;
};

inline std::set<EntityKey> entity_keys(const std::vector<EntityMention>& mentions) {
  std::set<EntityKey> keys;
  for (const auto& m : mentions) keys.emplace(m.canonical_id, m.negated);
  return keys;
}

inline OverlapReport entity_overlap(const std::vector<EntityMention>& source, const std::vector<EntityMention>& summary) {
  const auto s = entity_keys(source);
  const auto t = entity_keys(summary);
  OverlapReport r;
  r.source_keys = s.size();
  std::set_intersection(s.begin(), s.end(), t.begin(), t.end(), std::inserter(r.retained, r.retained.end()));
  std::set_difference(s.begin(), s.end(), t.begin(), t.end(), std::inserter(r.lost, r.lost.end()));
  std::set_difference(t.begin(), t.end(), s.begin(), s.end(), std::inserter(r.hallucinated, r.hallucinated.end()));
  return r;
}

// True when some entity id appears with both polarities across lost/hallucinated.
inline bool has_negation_flip(const OverlapReport& r) {
  for (const auto& [id, neg] : r.lost)
    if (r.hallucinated.contains({id, !neg})) return true;
  return false;
}

}  // namespace faithsum
