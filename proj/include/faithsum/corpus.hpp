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

// Dataset ingestion: delimited tables and record-lines files, normalized
// into (question, summary) records.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "faithsum/error.hpp"
#include "faithsum/io.hpp"
#include "faithsum/unicode.hpp"

namespace faithsum {

struct ChqRecord {
  std::string id;
  std::string question;
  std::optional<std::string> reference_summary;
  Language language = Language::English;

  bool operator==(const ChqRecord&) const = default;
};

enum class DatasetFormat { DelimitedTable, RecordLines };

inline DatasetFormat parse_dataset_format(std::string_view s) {
  if (s == "delimited-table" || s == "csv") return DatasetFormat::DelimitedTable;
  if (s == "record-lines" || s == "jsonl") return DatasetFormat::RecordLines;
  throw ConfigError("unknown dataset format '" + std::string(s) + "'");
}

struct DatasetManifest {
  std::string name;
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::DelimitedTable;
  std::string question_field = "question";
  std::string summary_field = "summary";  // empty: inference-only, no references
  std::string id_field;                   // empty: ids are "<name>-<row>"
  Language language = Language::English;
  bool strict = false;
  // Pre-split files, keyed "train"/"validation"/"test". Same field mapping.
  std::map<std::string, std::filesystem::path> split_paths;
};

struct RowIssue {
  std::size_t row = 0;  // 1-based data row (header excluded)
  std::string reason;
};

struct LoadResult {
  std::vector<ChqRecord> records;
  std::size_t source_rows = 0;
  std::vector<RowIssue> rejected;
};

// Strips control characters, collapses whitespace runs to one space, trims,
// and converts to NFC. Casing is untouched.
inline std::string normalize_text(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  bool pending_space = false;
  for (auto cp : unicode::CodePoints(raw)) {
    if (unicode::is_whitespace(cp.value)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (unicode::is_control(cp.value)) continue;
    if (pending_space) collapsed.push_back(' ');
    pending_space = false;
    unicode::append_utf8(collapsed, cp.value);
  }
  return unicode::to_nfc(collapsed);
}

inline ChqRecord normalize_record(std::string_view raw_question, std::optional<std::string_view> raw_summary,
                                  Language lang, std::string id = {}) {
  ChqRecord rec;
  rec.id = std::move(id);
  rec.language = lang;
  rec.question = normalize_text(raw_question);
  if (rec.question.empty()) throw DataError("question is empty after normalization");
  if (raw_summary) {
    auto s = normalize_text(*raw_summary);
    if (!s.empty()) rec.reference_summary = std::move(s);
  }
  return rec;
}

namespace detail {

// RFC 4180 style reader: comma separator, double-quoted fields with ""
// escapes, quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {
    if (text_.starts_with("\xEF\xBB\xBF")) text_.remove_prefix(3);
  }

  // Returns false at end of input. Throws DataError on an unterminated quote.
  bool next(std::vector<std::string>& fields, bool& quote_error) {
    fields.clear();
    quote_error = false;
    if (pos_ >= text_.size()) return false;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (in_quotes) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            in_quotes = false;
          }
        } else {
          field.push_back(c);
        }
        continue;
      }
      if (c == '"') {
        if (field.empty() && !field_was_quoted) {
          in_quotes = true;
          field_was_quoted = true;
        } else {
          quote_error = true;
          field.push_back(c);
        }
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
      } else if (c == '\n' || c == '\r') {
        if (c == '\r' && pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        fields.push_back(std::move(field));
        return true;
      } else {
        if (field_was_quoted) quote_error = true;
        field.push_back(c);
      }
    }
    if (in_quotes) quote_error = true;
    fields.push_back(std::move(field));
    return true;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline bool blank_row(const std::vector<std::string>& fields) {
  return fields.size() == 1 && io::trim(fields[0]).empty();
}

struct RawRow {
  std::size_t row;
  std::string id;
  std::string question;
  std::optional<std::string> summary;
};

class RowSink {
 public:
  RowSink(const DatasetManifest& m, LoadResult& out) : m_(m), out_(out) {}

  void reject(std::size_t row, std::string reason) {
    if (m_.strict)
      throw DataError(m_.path.string() + ": row " + std::to_string(row) + ": " + reason);
    out_.rejected.push_back({row, std::move(reason)});
  }

  void accept(RawRow raw) {
    if (!unicode::is_valid_utf8(raw.question) || (raw.summary && !unicode::is_valid_utf8(*raw.summary)))
      return reject(raw.row, "invalid UTF-8");
    std::string id = raw.id.empty() ? m_.name + "-" + std::to_string(raw.row) : normalize_text(raw.id);
    if (!seen_.insert(id).second) return reject(raw.row, "duplicate id '" + id + "'");
    try {
      out_.records.push_back(normalize_record(raw.question, raw.summary, m_.language, std::move(id)));
    } catch (const DataError& e) {
      reject(raw.row, e.what());
    }
  }

 private:
  const DatasetManifest& m_;
  LoadResult& out_;
  std::unordered_set<std::string> seen_;
};

inline LoadResult load_delimited(const DatasetManifest& m, std::string_view text) {
  LoadResult out;
  CsvReader reader(text);
  std::vector<std::string> header;
  bool quote_error = false;
  if (!reader.next(header, quote_error) || blank_row(header))
    throw DataError(m.path.string() + ": missing header row");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(io::trim(header[i])), i);
  auto column = [&](const std::string& field) -> std::optional<std::size_t> {
    if (field.empty()) return std::nullopt;
    auto it = col.find(field);
    if (it == col.end()) throw DataError(m.path.string() + ": mapped field '" + field + "' not in header");
    return it->second;
  };
  const auto q_col = column(m.question_field);
  if (!q_col) throw ConfigError("question field mapping is required");
  const auto s_col = column(m.summary_field);
  const auto id_col = column(m.id_field);

  RowSink sink(m, out);
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (reader.next(fields, quote_error)) {
    if (blank_row(fields)) continue;
    ++row;
    ++out.source_rows;
    if (quote_error) {
      sink.reject(row, "malformed quoting");
      continue;
    }
    if (fields.size() != header.size()) {
      sink.reject(row, "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
      continue;
    }
    RawRow raw{row, id_col ? fields[*id_col] : std::string{}, fields[*q_col], std::nullopt};
    if (s_col) raw.summary = fields[*s_col];
    sink.accept(std::move(raw));
  }
  return out;
}

inline std::string json_field_as_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  return v.dump();
}

inline LoadResult load_record_lines(const DatasetManifest& m, std::string_view text) {
  LoadResult out;
  RowSink sink(m, out);
  std::size_t row = 0;
  bool checked_fields = false;
  for (const auto& line : io::split_lines(text)) {
    if (io::trim(line).empty()) continue;
    ++row;
    ++out.source_rows;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      sink.reject(row, "not a valid JSON object");
      continue;
    }
    if (!obj.is_object()) {
      sink.reject(row, "not a JSON object");
      continue;
    }
    if (!checked_fields) {
      // Field mapping is validated against the first record.
      for (const auto* f : {&m.question_field, &m.summary_field, &m.id_field})
        if (!f->empty() && !obj.contains(*f))
          throw DataError(m.path.string() + ": mapped field '" + *f + "' not in first record");
      checked_fields = true;
    }
    if (!obj.contains(m.question_field)) {
      sink.reject(row, "missing field '" + m.question_field + "'");
      continue;
    }
    RawRow raw{row, {}, json_field_as_string(obj[m.question_field]), std::nullopt};
    if (!m.id_field.empty() && obj.contains(m.id_field)) raw.id = json_field_as_string(obj[m.id_field]);
    if (!m.summary_field.empty() && obj.contains(m.summary_field) && !obj[m.summary_field].is_null())
      raw.summary = json_field_as_string(obj[m.summary_field]);
    sink.accept(std::move(raw));
  }
  return out;
}

}  // namespace detail

inline LoadResult load_dataset(const DatasetManifest& m) {
  if (!std::filesystem::exists(m.path)) throw DataError("dataset file not found: " + m.path.string());
  const std::string text = io::read_file(m.path);
  return m.format == DatasetFormat::DelimitedTable ? detail::load_delimited(m, text)
                                                   : detail::load_record_lines(m, text);
}

inline nlohmann::json to_json(const ChqRecord& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["language"] = to_string(r.language);
  j["question"] = r.question;
  j["summary"] = r.reference_summary ? nlohmann::json(*r.reference_summary) : nlohmann::json(nullptr);
  return j;
}

inline std::string to_record_lines(const std::vector<ChqRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

// Manifest that reads back a dump written by to_record_lines.
inline DatasetManifest record_lines_manifest(std::string name, std::filesystem::path path, Language lang) {
  DatasetManifest m;
  m.name = std::move(name);
  m.path = std::move(path);
  m.format = DatasetFormat::RecordLines;
  m.question_field = "question";
  m.summary_field = "summary";
  m.id_field = "id";
  m.language = lang;
  return m;
}

struct DatasetSplits {
  std::vector<ChqRecord> train;
  std::vector<ChqRecord> validation;
  std::vector<ChqRecord> test;
};

// Seeded Fisher-Yates followed by an 80/10/10 cut. The index draw uses
// rejection sampling on mt19937_64 so the permutation is identical across
// standard library implementations.
inline DatasetSplits split_records(std::vector<ChqRecord> records, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw_below = [&rng](std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return x % bound;
  };
  for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[draw_below(i)]);
  const std::size_t n = records.size();
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = n / 10;
  DatasetSplits s;
  s.train.assign(std::make_move_iterator(records.begin()), std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train)));
  s.validation.assign(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train)),
                      std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train + n_val)));
  s.test.assign(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(n_train + n_val)), std::make_move_iterator(records.end()));
  return s;
}

// Uses the dataset's own split files when the manifest lists them,
// otherwise a seeded shuffle of the main file.
inline DatasetSplits load_splits(const DatasetManifest& m, std::uint64_t seed) {
  if (m.split_paths.empty()) return split_records(load_dataset(m).records, seed);
  DatasetSplits s;
  for (const auto& [name, path] : m.split_paths) {
    DatasetManifest part = m;
    part.path = path;
    part.name = m.name + "-" + name;
    auto records = load_dataset(part).records;
    if (name == "train") s.train = std::move(records);
    else if (name == "validation" || name == "dev") s.validation = std::move(records);
    else if (name == "test") s.test = std::move(records);
    else throw ConfigError("unknown split name '" + name + "'");
  }
  return s;
}

}  // namespace faithsum
