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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "faithsum/error.hpp"

namespace faithsum {

enum class Language { English, Bangla };

inline std::string_view to_string(Language lang) {
  return lang == Language::English ? "en" : "bn";
}

inline Language parse_language(std::string_view s) {
  if (s == "en" || s == "english" || s == "English") return Language::English;
  if (s == "bn" || s == "bangla" || s == "Bangla" || s == "bengali") return Language::Bangla;
  throw ConfigError("unknown language '" + std::string(s) + "' (expected en or bn)");
}

namespace unicode {

// One decoded code point and the byte range it occupies.
struct CodePoint {
  char32_t value;
  std::size_t begin;
  std::size_t end;
};

// Decodes the code point starting at byte `pos`. Ill-formed sequences
// decode to U+FFFD and consume at least one byte.
inline CodePoint decode_at(std::string_view s, std::size_t pos) {
  int32_t i = static_cast<int32_t>(pos);
  const auto len = static_cast<int32_t>(s.size());
  UChar32 c = 0;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), i, len, c);
  if (c < 0) c = 0xFFFD;
  return {static_cast<char32_t>(c), pos, static_cast<std::size_t>(i)};
}

// Forward iteration over code points: for (auto cp : CodePoints(s)).
class CodePoints {
 public:
  explicit CodePoints(std::string_view s) : s_(s) {}

  class iterator {
   public:
    iterator(std::string_view s, std::size_t pos) : s_(s), pos_(pos) {}
    CodePoint operator*() const { return decode_at(s_, pos_); }
    iterator& operator++() {
      pos_ = decode_at(s_, pos_).end;
      return *this;
    }
    bool operator==(const iterator& o) const { return pos_ == o.pos_; }

   private:
    std::string_view s_;
    std::size_t pos_;
  };

  iterator begin() const { return {s_, 0}; }
  iterator end() const { return {s_, s_.size()}; }

 private:
  std::string_view s_;
};

inline bool is_valid_utf8(std::string_view s) {
  std::size_t pos = 0;
  while (pos < s.size()) {
    int32_t i = static_cast<int32_t>(pos);
    UChar32 c = 0;
    U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), i, static_cast<int32_t>(s.size()), c);
    if (c < 0) return false;
    pos = static_cast<std::size_t>(i);
  }
  return true;
}

inline void append_utf8(std::string& out, char32_t c) {
  uint8_t buf[4];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, 4, static_cast<UChar32>(c), error);
  if (!error) out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

inline bool is_control(char32_t c) { return u_charType(static_cast<UChar32>(c)) == U_CONTROL_CHAR; }

inline bool is_mark(char32_t c) {
  const auto t = u_charType(static_cast<UChar32>(c));
  return t == U_NON_SPACING_MARK || t == U_COMBINING_SPACING_MARK || t == U_ENCLOSING_MARK;
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

// Zero-width joiner / non-joiner; word-internal in Bangla conjunct spelling.
inline bool is_joiner(char32_t c) { return c == 0x200C || c == 0x200D; }

inline bool is_word_char(char32_t c) { return is_letter(c) || is_digit(c) || is_mark(c); }

inline std::string to_nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString n = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string out;
  n.toUTF8String(out);
  return out;
}

inline std::string to_lower(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for ([[maybe_unused]] auto cp : CodePoints(s)) ++n;
  return n;
}

}  // namespace unicode
}  // namespace faithsum
