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

// Rule-based sentence segmentation, tokenization and syllable estimation
// for English and Bangla text. All offsets are UTF-8 byte offsets into the
// text that was passed in.

#include <algorithm>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "faithsum/io.hpp"
#include "faithsum/unicode.hpp"

namespace faithsum {

struct SentenceSpan {
  std::size_t index = 0;
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

struct Token {
  std::string surface;
  std::string normalized;  // lowercase for English, identical to surface for Bangla
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool is_word = false;  // alphanumeric run; false for punctuation and symbols

  bool operator==(const Token&) const = default;
};

// A set of normalized entries read from a one-entry-per-line data file.
// A comment line of the form "# version: X" sets the version string.
struct WordList {
  std::unordered_set<std::string> entries;
  std::string version = "builtin";

  bool contains(std::string_view w) const { return entries.contains(std::string(w)); }
  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

inline std::string normalize_token_text(std::string_view s, Language lang) {
  return lang == Language::English ? unicode::to_lower(s) : std::string(s);
}

inline WordList make_word_list(std::initializer_list<std::string_view> words, Language lang) {
  WordList list;
  for (auto w : words) list.entries.insert(normalize_token_text(w, lang));
  return list;
}

inline WordList load_word_list(const std::filesystem::path& path, Language lang) {
  WordList list;
  for (const auto& raw : io::split_lines(io::read_file(path))) {
    auto line = io::trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view tag = "# version:";
      if (line.starts_with(tag)) list.version = std::string(io::trim(line.substr(tag.size())));
      continue;
    }
    list.entries.insert(normalize_token_text(unicode::to_nfc(line), lang));
  }
  return list;
}

// Starting abbreviation set; the data file abbreviations_en.txt is a superset.
inline const WordList& builtin_abbreviations() {
  static const WordList list = make_word_list(
      {"dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.", "vs.", "etc.", "e.g.", "i.e.",
       "approx.", "no.", "fig.", "mg.", "mcg.", "ml.", "kg.", "g.", "tab.", "caps.", "b.i.d.",
       "t.i.d.", "q.i.d.", "p.r.n.", "a.m.", "p.m."},
      Language::English);
  return list;
}

namespace detail {

inline bool is_sentence_terminal(char32_t c, Language lang) {
  if (c == U'.' || c == U'!' || c == U'?' || c == U'…') return true;
  return lang == Language::Bangla && (c == U'।' || c == U'॥');
}

inline bool is_danda(char32_t c) { return c == U'।' || c == U'॥'; }

inline bool is_closing_punct(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U')': case U']': case U'}':
    case U'”': case U'’': case U'»':
      return true;
    default:
      return false;
  }
}

inline bool is_opening_punct(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U'(': case U'[': case U'{':
    case U'“': case U'‘': case U'«':
      return true;
    default:
      return false;
  }
}

// The whitespace-delimited chunk ending at byte `end` (exclusive), with
// opening punctuation stripped from its front.
inline std::string_view chunk_before(std::string_view text, std::size_t chunk_floor, std::size_t end) {
  std::size_t begin = end;
  while (begin > chunk_floor) {
    std::size_t prev = begin - 1;
    while (prev > chunk_floor && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
    if (unicode::is_whitespace(unicode::decode_at(text, prev).value)) break;
    begin = prev;
  }
  while (begin < end) {
    auto cp = unicode::decode_at(text, begin);
    if (!is_opening_punct(cp.value)) break;
    begin = cp.end;
  }
  return text.substr(begin, end - begin);
}

}  // namespace detail

// Splits on runs of terminal punctuation (. ! ? and, for Bangla, the danda)
// followed by whitespace or end of text. A single period closing a known
// abbreviation does not split. Closing quotes/brackets after the terminal
// stay with the sentence.
inline std::vector<SentenceSpan> segment_sentences(std::string_view text, Language lang,
                                                   const WordList& abbreviations = builtin_abbreviations()) {
  std::vector<SentenceSpan> spans;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;  // first non-space byte of the open sentence
  std::size_t last_non_space_end = 0;

  auto close = [&](std::size_t end) {
    spans.push_back({spans.size(), std::string(text.substr(start, end - start)), start, end});
    start = std::string_view::npos;
  };

  while (pos < text.size()) {
    auto cp = unicode::decode_at(text, pos);
    if (unicode::is_whitespace(cp.value)) {
      pos = cp.end;
      continue;
    }
    if (start == std::string_view::npos) start = cp.begin;
    if (!detail::is_sentence_terminal(cp.value, lang)) {
      last_non_space_end = cp.end;
      pos = cp.end;
      continue;
    }

    // Consume the whole run of terminals, then trailing closers.
    const std::size_t run_begin = cp.begin;
    std::size_t run_end = cp.end;
    bool saw_danda = detail::is_danda(cp.value);
    std::size_t run_len = 1;
    while (run_end < text.size()) {
      auto next = unicode::decode_at(text, run_end);
      if (!detail::is_sentence_terminal(next.value, lang)) break;
      saw_danda = saw_danda || detail::is_danda(next.value);
      run_end = next.end;
      ++run_len;
    }
    std::size_t end = run_end;
    while (end < text.size()) {
      auto next = unicode::decode_at(text, end);
      if (!detail::is_closing_punct(next.value)) break;
      end = next.end;
    }
    last_non_space_end = end;
    pos = end;

    const bool at_boundary = end == text.size() || unicode::is_whitespace(unicode::decode_at(text, end).value);
    if (!saw_danda && !at_boundary) continue;
    if (!saw_danda && run_len == 1 && text[run_begin] == '.' && end == run_end) {
      auto chunk = detail::chunk_before(text, start, run_end);
      if (abbreviations.contains(normalize_token_text(chunk, lang)) && end != text.size()) continue;
    }
    close(end);
  }
  if (start != std::string_view::npos) close(last_non_space_end);
  return spans;
}

// Word tokens are maximal runs of letters, digits and combining marks
// (joiners are kept when they sit inside a run). Every other
// non-whitespace code point becomes its own non-word token.
inline std::vector<Token> tokenize(std::string_view text, Language lang) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto cp = unicode::decode_at(text, pos);
    if (unicode::is_whitespace(cp.value)) {
      pos = cp.end;
      continue;
    }
    if (unicode::is_word_char(cp.value)) {
      std::size_t end = cp.end;
      while (end < text.size()) {
        auto next = unicode::decode_at(text, end);
        if (unicode::is_word_char(next.value)) {
          end = next.end;
        } else if (unicode::is_joiner(next.value) && next.end < text.size() &&
                   unicode::is_word_char(unicode::decode_at(text, next.end).value)) {
          end = next.end;
        } else {
          break;
        }
      }
      auto surface = text.substr(cp.begin, end - cp.begin);
      tokens.push_back({std::string(surface), normalize_token_text(surface, lang), cp.begin, end, true});
      pos = end;
    } else {
      auto surface = text.substr(cp.begin, cp.end - cp.begin);
      tokens.push_back({std::string(surface), std::string(surface), cp.begin, cp.end, false});
      pos = cp.end;
    }
  }
  return tokens;
}

// Normalized forms of the word tokens, in order.
inline std::vector<std::string> word_forms(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (t.is_word) out.push_back(t.normalized);
  return out;
}

inline std::size_t count_words(const std::vector<Token>& tokens) {
  return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

// Vowel-group heuristic: count runs of [aeiouy], drop a silent final "e"
// unless the word ends in consonant+"le", never below 1.
inline int count_syllables(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c >= 'a' && c <= 'z') w.push_back(c);
  }
  auto is_vowel = [](char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; };
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  if (groups > 1 && w.size() >= 2 && w.back() == 'e' && !is_vowel(w[w.size() - 2])) {
    const bool consonant_le = w.size() >= 3 && w[w.size() - 2] == 'l' && !is_vowel(w[w.size() - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

}  // namespace faithsum
