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

// Faithfulness scoring against an NLI/BERTScore scorer: SummaC zero-shot,
// chunked alignment, entity retention; per-summary score reports and
// best-of-n candidate selection.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faithsum/error.hpp"
#include "faithsum/generate.hpp"
#include "faithsum/io.hpp"
#include "faithsum/medner.hpp"
#include "faithsum/metrics.hpp"
#include "faithsum/textproc.hpp"

namespace faithsum {

struct SentencePair {
  std::string premise;
  std::string hypothesis;

  bool operator==(const SentencePair&) const = default;
};

struct NliScores {
  double entail = 0.0;
  double contradict = 0.0;
  double neutral = 0.0;
};

struct BertScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::string model_id;
};

inline constexpr double kSimplexTolerance = 1e-4;

inline void validate_nli_scores(const NliScores& s) {
  for (double v : {s.entail, s.contradict, s.neutral})
    if (!std::isfinite(v) || v < 0.0) throw ProtocolError("NLI probability is negative or not finite");
  if (std::abs(s.entail + s.contradict + s.neutral - 1.0) > kSimplexTolerance)
    throw ProtocolError("NLI probabilities do not sum to 1");
}

// Anything that can score sentence pairs for entailment and compute
// BERTScore. Implementations must be safe to share across threads.
class ScorerClient {
 public:
  virtual ~ScorerClient() = default;
  virtual std::string model_id() const = 0;
  virtual std::vector<NliScores> nli(std::span<const SentencePair> pairs) const = 0;
  virtual BertScore bertscore(const std::string& candidate, const std::string& reference, Language lang) const = 0;
};

// ---------------------------------------------------------------------------
// HTTP sidecar client

struct ScorerHealth {
  std::string status;
  std::vector<std::string> models;
  bool ready = false;
};

class HttpScorerClient final : public ScorerClient {
 public:
  static constexpr std::size_t kMaxPairsPerRequest = 256;

  explicit HttpScorerClient(std::string base_url, int timeout_seconds = 120)
      : url_(parse_base_url(base_url)), timeout_(timeout_seconds) {}

  ScorerHealth health() const {
    auto res = client().Get(url_.path_prefix + "/v1/health");
    if (!res) throw UnreachableError("scorer unreachable at " + url_.scheme_host_port + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw ServiceError(res->status, excerpt(res->body), "scorer health check failed");
    try {
      auto j = nlohmann::json::parse(res->body);
      ScorerHealth h;
      h.status = j.value("status", "");
      h.ready = j.value("ready", false);
      if (j.contains("models")) h.models = j["models"].get<std::vector<std::string>>();
      return h;
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed health response: ") + e.what());
    }
  }

  std::string model_id() const override {
    std::lock_guard lock(mu_);
    if (model_id_.empty()) {
      auto h = health();
      std::string joined;
      for (const auto& m : h.models) joined += (joined.empty() ? "" : "+") + m;
      model_id_ = joined.empty() ? "unknown" : joined;
    }
    return model_id_;
  }

  std::vector<NliScores> nli(std::span<const SentencePair> pairs) const override {
    std::vector<NliScores> out;
    out.reserve(pairs.size());
    for (std::size_t base = 0; base < pairs.size(); base += kMaxPairsPerRequest) {
      auto batch = pairs.subspan(base, std::min(kMaxPairsPerRequest, pairs.size() - base));
      nlohmann::json req;
      req["pairs"] = nlohmann::json::array();
      for (const auto& p : batch) req["pairs"].push_back({{"premise", p.premise}, {"hypothesis", p.hypothesis}});
      auto j = post("/v1/nli", req);
      if (!j.contains("scores") || !j["scores"].is_array()) throw ProtocolError("NLI response lacks 'scores'");
      if (j["scores"].size() != batch.size()) throw ProtocolError("NLI response length does not match request");
      for (const auto& s : j["scores"]) {
        NliScores v;
        try {
          v = {s.at("entail").get<double>(), s.at("contradict").get<double>(), s.at("neutral").get<double>()};
        } catch (const nlohmann::json::exception& e) {
          throw ProtocolError(std::string("malformed NLI triple: ") + e.what());
        }
        validate_nli_scores(v);
        out.push_back(v);
      }
    }
    return out;
  }

  BertScore bertscore(const std::string& candidate, const std::string& reference, Language lang) const override {
    auto j = post("/v1/bertscore", {{"candidate", candidate}, {"reference", reference}, {"lang", to_string(lang)}});
    try {
      return {j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>(),
              j.value("model_id", "")};
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed bertscore response: ") + e.what());
    }
  }

 private:
  static std::string excerpt(const std::string& body) { return body.substr(0, 200); }

  httplib::Client client() const {
    httplib::Client c(url_.scheme_host_port);
    c.set_connection_timeout(10, 0);
    c.set_read_timeout(timeout_, 0);
    return c;
  }

  nlohmann::json post(const std::string& route, const nlohmann::json& body) const {
    auto res = client().Post(url_.path_prefix + route, body.dump(), "application/json");
    if (!res) throw UnreachableError("scorer unreachable at " + url_.scheme_host_port + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw ServiceError(res->status, excerpt(res->body),
                         "scorer " + route + " failed with HTTP " + std::to_string(res->status) + ": " + excerpt(res->body));
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError("scorer " + route + " returned invalid JSON: " + e.what());
    }
  }

  ParsedUrl url_;
  int timeout_;
  mutable std::mutex mu_;
  mutable std::string model_id_;
};

// ---------------------------------------------------------------------------
// Deterministic in-process scorer

namespace detail {

inline bool has_bangla(std::string_view s) {
  for (auto cp : unicode::CodePoints(s))
    if (cp.value >= 0x0980 && cp.value <= 0x09FF) return true;
  return false;
}

inline const WordList& stub_negations() {
  static const WordList w = [] {
    WordList l = make_word_list({"no", "not", "never", "without", "denies", "denied", "none", "neither", "nor", "t"},
                                Language::English);
    for (auto b : {"না", "নেই", "নয়", "নাই", "ছাড়া"}) l.entries.insert(unicode::to_nfc(b));
    return l;
  }();
  return w;
}

}  // namespace detail

// Lexical NLI approximation used when no model sidecar is present. With c
// the share of the hypothesis's content words found in the premise:
//   entail = 0.05 + 0.9c, contradict = 0.05, neutral = rest,
// unless exactly one side contains a negation word, in which case
//   entail = 0.05, contradict = 0.1 + 0.8c.
// BERTScore is replaced by unigram precision/recall/F1.
class LexicalStubScorer final : public ScorerClient {
 public:
  std::string model_id() const override { return "lexical-stub-v1"; }

  std::vector<NliScores> nli(std::span<const SentencePair> pairs) const override {
    std::vector<NliScores> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(score(p));
    return out;
  }

  BertScore bertscore(const std::string& candidate, const std::string& reference, Language lang) const override {
    auto c = word_forms(tokenize(candidate, lang));
    auto r = word_forms(tokenize(reference, lang));
    auto s = rouge_n(c, r, 1);
    return {s.precision, s.recall, s.f1, model_id()};
  }

 private:
  static NliScores score(const SentencePair& p) {
    const Language lang = detail::has_bangla(p.premise + p.hypothesis) ? Language::Bangla : Language::English;
    const auto& neg = detail::stub_negations();
    auto content = [&](const std::string& text, bool& negated) {
      std::set<std::string> words;
      negated = false;
      for (const auto& t : tokenize(text, lang)) {
        if (!t.is_word) continue;
        if (neg.contains(t.normalized)) negated = true;
        else words.insert(t.normalized);
      }
      return words;
    };
    bool prem_neg = false, hyp_neg = false;
    const auto prem = content(p.premise, prem_neg);
    const auto hyp = content(p.hypothesis, hyp_neg);
    std::size_t shared = 0;
    for (const auto& w : hyp) shared += prem.count(w);
    const double c = hyp.empty() ? 1.0 : static_cast<double>(shared) / static_cast<double>(hyp.size());
    NliScores s;
    if (prem_neg != hyp_neg) {
      s.entail = 0.05;
      s.contradict = 0.1 + 0.8 * c;
    } else {
      s.entail = 0.05 + 0.9 * c;
      s.contradict = 0.05;
    }
    s.neutral = std::max(0.0, 1.0 - s.entail - s.contradict);
    return s;
  }
};

// ---------------------------------------------------------------------------
// On-disk cache

// Content-addressed cache in front of another scorer. Entries are keyed by
// SHA-256 of (kind, scorer model id, texts) and written via rename, so
// concurrent readers and writers never see partial files.
class CachingScorer final : public ScorerClient {
 public:
  CachingScorer(const ScorerClient& inner, std::filesystem::path dir) : inner_(inner), dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::string model_id() const override { return inner_.model_id(); }

  std::vector<NliScores> nli(std::span<const SentencePair> pairs) const override {
    const auto model = model_id();
    std::vector<NliScores> out(pairs.size());
    std::vector<std::size_t> misses;
    std::vector<SentencePair> miss_pairs;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto path = entry_path("nli", model, pairs[i].premise, pairs[i].hypothesis);
      if (auto j = read(path)) {
        out[i] = {j->at("entail").get<double>(), j->at("contradict").get<double>(), j->at("neutral").get<double>()};
      } else {
        misses.push_back(i);
        miss_pairs.push_back(pairs[i]);
      }
    }
    if (!miss_pairs.empty()) {
      auto fresh = inner_.nli(miss_pairs);
      if (fresh.size() != miss_pairs.size()) throw ProtocolError("NLI response length does not match request");
      for (std::size_t k = 0; k < misses.size(); ++k) {
        out[misses[k]] = fresh[k];
        write(entry_path("nli", model, miss_pairs[k].premise, miss_pairs[k].hypothesis),
              {{"entail", fresh[k].entail}, {"contradict", fresh[k].contradict}, {"neutral", fresh[k].neutral}});
      }
    }
    return out;
  }

  BertScore bertscore(const std::string& candidate, const std::string& reference, Language lang) const override {
    const auto path = entry_path("bertscore-" + std::string(to_string(lang)), model_id(), candidate, reference);
    if (auto j = read(path))
      return {j->at("precision").get<double>(), j->at("recall").get<double>(), j->at("f1").get<double>(),
              j->value("model_id", "")};
    auto s = inner_.bertscore(candidate, reference, lang);
    write(path, {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}, {"model_id", s.model_id}});
    return s;
  }

  std::size_t hits() const { return hits_; }

 private:
  std::filesystem::path entry_path(const std::string& kind, const std::string& model, const std::string& a,
                                   const std::string& b) const {
    std::string key = kind;
    for (const auto* part : {&model, &a, &b}) {
      key += '\x1f';
      key += std::to_string(part->size());
      key += ':';
      key += *part;
    }
    const auto h = io::sha256_hex(key);
    return dir_ / h.substr(0, 2) / (h + ".json");
  }

  std::optional<nlohmann::json> read(const std::filesystem::path& p) const {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    try {
      auto j = nlohmann::json::parse(in);
      std::lock_guard lock(mu_);
      ++hits_;
      return j;
    } catch (const nlohmann::json::exception&) {
      return std::nullopt;
    }
  }

  void write(const std::filesystem::path& p, const nlohmann::json& j) const {
    std::filesystem::create_directories(p.parent_path());
    std::string tmp_name;
    {
      std::lock_guard lock(mu_);
      tmp_name = p.filename().string() + ".tmp" + std::to_string(++tmp_counter_) + "-" +
                 std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    }
    const auto tmp = p.parent_path() / tmp_name;
    io::write_file(tmp, j.dump());
    std::error_code ec;
    std::filesystem::rename(tmp, p, ec);
    if (ec) std::filesystem::remove(tmp, ec);
  }

  const ScorerClient& inner_;
  std::filesystem::path dir_;
  mutable std::mutex mu_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t tmp_counter_ = 0;
};

// ---------------------------------------------------------------------------
// SummaC zero-shot and chunked alignment

// rows = summary sentences, cols = source sentences, row-major cells.
struct NliMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<NliScores> cells;

  const NliScores& at(std::size_t r, std::size_t c) const { return cells[r * cols + c]; }
};

inline NliMatrix nli_matrix(const std::vector<std::string>& source_sentences, const std::vector<std::string>& summary_sentences,
                            const ScorerClient& scorer) {
  if (source_sentences.empty() || summary_sentences.empty()) throw ConfigError("nli_matrix: empty sentence list");
  std::vector<SentencePair> pairs;
  pairs.reserve(source_sentences.size() * summary_sentences.size());
  for (const auto& hyp : summary_sentences)
    for (const auto& prem : source_sentences) pairs.push_back({prem, hyp});
  NliMatrix m{summary_sentences.size(), source_sentences.size(), scorer.nli(pairs)};
  if (m.cells.size() != pairs.size()) throw ProtocolError("NLI response length does not match request");
  for (const auto& c : m.cells) validate_nli_scores(c);
  return m;
}

// Mean over summary sentences of max over source sentences of (entail - contradict).
inline double summac_zs(const NliMatrix& m) {
  if (m.rows == 0 || m.cols == 0) throw ConfigError("summac_zs: empty matrix");
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.cols; ++c) best = std::max(best, m.at(r, c).entail - m.at(r, c).contradict);
    total += best;
  }
  return total / static_cast<double>(m.rows);
}

// Consecutive chunks of at most chunk_size sentences, joined with spaces.
inline std::vector<std::string> chunk_sentences(const std::vector<std::string>& sentences, std::size_t chunk_size) {
  if (chunk_size == 0) throw ConfigError("chunk_size must be >= 1");
  std::vector<std::string> chunks;
  for (std::size_t i = 0; i < sentences.size(); i += chunk_size) {
    std::string chunk;
    for (std::size_t k = i; k < std::min(sentences.size(), i + chunk_size); ++k) {
      if (!chunk.empty()) chunk.push_back(' ');
      chunk += sentences[k];
    }
    chunks.push_back(std::move(chunk));
  }
  return chunks;
}

inline constexpr std::size_t kDefaultAlignChunkSize = 4;

// Mean over summary sentences of the best entailment probability against
// any source chunk. In [0, 1].
inline double align_zs(const std::vector<std::string>& source_sentences, const std::vector<std::string>& summary_sentences,
                       const ScorerClient& scorer, std::size_t chunk_size = kDefaultAlignChunkSize) {
  const auto chunks = chunk_sentences(source_sentences, chunk_size);
  const auto m = nli_matrix(chunks, summary_sentences, scorer);
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows; ++r) {
    double best = 0.0;
    for (std::size_t c = 0; c < m.cols; ++c) best = std::max(best, m.at(r, c).entail);
    total += best;
  }
  return total / static_cast<double>(m.rows);
}

inline double bert_f1(const std::string& candidate, const std::string& reference, Language lang, const ScorerClient& scorer) {
  const auto s = scorer.bertscore(candidate, reference, lang);
  for (double v : {s.precision, s.recall, s.f1})
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw ProtocolError("bertscore value outside [0, 1]");
  return s.f1;
}

// ---------------------------------------------------------------------------
// Entity retention

struct NerResources {
  const Gazetteer* gazetteer = nullptr;
  const NegationLexicon* negation = nullptr;
  std::size_t window = kDefaultNegationWindow;
  const WordList* abbreviations = &builtin_abbreviations();
};

// Tags every sentence of `text`; mention sentence indices follow the segmentation.
inline std::vector<EntityMention> tag_text(std::string_view text, Language lang, const NerResources& ner) {
  std::vector<EntityMention> all;
  for (const auto& s : segment_sentences(text, lang, *ner.abbreviations)) {
    auto m = tag_entities(tokenize(s.text, lang), *ner.gazetteer, *ner.negation, ner.window, s.index);
    all.insert(all.end(), std::make_move_iterator(m.begin()), std::make_move_iterator(m.end()));
  }
  return all;
}

struct RetentionResult {
  double retention = 1.0;
  bool negation_consistent = true;
  OverlapReport overlap;
};

inline RetentionResult entity_retention(const ChqRecord& record, std::string_view summary, const NerResources& ner) {
  RetentionResult r;
  r.overlap = entity_overlap(tag_text(record.question, record.language, ner), tag_text(summary, record.language, ner));
  r.retention = r.overlap.source_keys == 0
                    ? 1.0
                    : static_cast<double>(r.overlap.retained.size()) / static_cast<double>(r.overlap.source_keys);
  r.negation_consistent = !has_negation_flip(r.overlap) && r.overlap.hallucinated.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Score reports and selection

struct ScoreReport {
  std::optional<PrfScore> r1, r2, rl;  // absent without a reference summary
  std::optional<double> bert_f1;
  std::optional<double> fre;  // English only
  double summac_zs = 0.0;
  double align = 0.0;
  double entity_retention = 1.0;
  bool negation_consistent = true;
};

struct ScoringOptions {
  const ScorerClient* scorer = nullptr;
  NerResources ner;
  std::size_t align_chunk_size = kDefaultAlignChunkSize;
  bool enable_bert = true;
};

inline std::vector<std::string> sentence_texts(std::string_view text, Language lang, const WordList& abbreviations) {
  std::vector<std::string> out;
  for (auto& s : segment_sentences(text, lang, abbreviations)) out.push_back(std::move(s.text));
  return out;
}

inline ScoreReport score_summary(const ChqRecord& record, const std::string& summary, const ScoringOptions& opt) {
  if (!opt.scorer) throw ConfigError("score_summary: no scorer");
  ScoreReport rep;
  const Language lang = record.language;
  if (record.reference_summary) {
    const auto rouge = rouge_text(summary, *record.reference_summary, lang);
    rep.r1 = rouge.r1;
    rep.r2 = rouge.r2;
    rep.rl = rouge.rl;
    if (opt.enable_bert) rep.bert_f1 = bert_f1(summary, *record.reference_summary, lang, *opt.scorer);
  }
  if (lang == Language::English) rep.fre = fre(summary, *opt.ner.abbreviations);

  const auto source = sentence_texts(record.question, lang, *opt.ner.abbreviations);
  const auto summ = sentence_texts(summary, lang, *opt.ner.abbreviations);
  rep.summac_zs = summac_zs(nli_matrix(source, summ, *opt.scorer));
  rep.align = align_zs(source, summ, *opt.scorer, opt.align_chunk_size);
  const auto ret = entity_retention(record, summary, opt.ner);
  rep.entity_retention = ret.retention;
  rep.negation_consistent = ret.negation_consistent;
  return rep;
}

inline nlohmann::json to_json(const PrfScore& s) { return {{"p", s.precision}, {"r", s.recall}, {"f1", s.f1}}; }

inline nlohmann::json to_json(const ScoreReport& r) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  auto prf = [](const std::optional<PrfScore>& v) { return v ? to_json(*v) : nlohmann::json(nullptr); };
  return {{"r1", prf(r.r1)},       {"r2", prf(r.r2)},
          {"rl", prf(r.rl)},       {"bert_f1", opt(r.bert_f1)},
          {"fre", opt(r.fre)},     {"summac_zs", r.summac_zs},
          {"align", r.align},      {"align_x100", r.align * 100.0},
          {"entity_retention", r.entity_retention}, {"negation_consistent", r.negation_consistent}};
}

enum class SelectorKind { Rouge1, Summac, Entity };
enum class Rouge1Target { Source, Reference };

struct SelectorSpec {
  SelectorKind kind = SelectorKind::Summac;
  std::optional<Rouge1Target> rouge1_target;

  static SelectorSpec rouge1(Rouge1Target t = Rouge1Target::Source) { return {SelectorKind::Rouge1, t}; }
  static SelectorSpec summac() { return {SelectorKind::Summac, std::nullopt}; }
  static SelectorSpec entity() { return {SelectorKind::Entity, std::nullopt}; }

  void validate() const {
    if ((kind == SelectorKind::Rouge1) != rouge1_target.has_value())
      throw ConfigError("rouge1 target is required for, and only for, the rouge1 selector");
  }
};

inline SelectorSpec parse_selector(std::string_view kind, std::string_view target = "source") {
  if (kind == "rouge1" || kind == "r1") {
    if (target == "source") return SelectorSpec::rouge1(Rouge1Target::Source);
    if (target == "reference" || target == "oracle") return SelectorSpec::rouge1(Rouge1Target::Reference);
    throw ConfigError("unknown rouge1 target '" + std::string(target) + "'");
  }
  if (kind == "summac") return SelectorSpec::summac();
  if (kind == "entity") return SelectorSpec::entity();
  throw ConfigError("unknown selector '" + std::string(kind) + "'");
}

inline std::string selector_name(const SelectorSpec& s) {
  switch (s.kind) {
    case SelectorKind::Rouge1: return *s.rouge1_target == Rouge1Target::Source ? "rouge1-source" : "rouge1-reference";
    case SelectorKind::Summac: return "summac";
    case SelectorKind::Entity: return "entity";
  }
  return "?";
}

struct ScoredCandidate {
  Candidate candidate;
  ScoreReport report;
  double r1_vs_source = 0.0;  // ROUGE-1 F1 of the candidate against the question
};

// Index of the first maximum of key(item) over items for which
// eligible(item) holds; ties go to the lower index.
template <class Range, class Key, class Eligible>
std::optional<std::size_t> argmax_first(const Range& items, Key key, Eligible eligible) {
  std::optional<std::size_t> best;
  decltype(key(*std::begin(items))) best_key{};
  std::size_t i = 0;
  for (const auto& item : items) {
    if (eligible(item) && (!best || best_key < key(item))) {
      best = i;
      best_key = key(item);
    }
    ++i;
  }
  return best;
}

// Key used by the selector; larger is better. Entity keys compare lexicographically.
inline std::tuple<double, double, double> selector_key(const ScoredCandidate& c, const SelectorSpec& spec) {
  switch (spec.kind) {
    case SelectorKind::Rouge1:
      if (*spec.rouge1_target == Rouge1Target::Source) return {c.r1_vs_source, 0.0, 0.0};
      return {c.report.r1 ? c.report.r1->f1 : 0.0, 0.0, 0.0};
    case SelectorKind::Summac:
      return {c.report.summac_zs, 0.0, 0.0};
    case SelectorKind::Entity:
      return {c.report.negation_consistent ? 1.0 : 0.0, c.report.entity_retention, c.report.summac_zs};
  }
  return {};
}

inline std::size_t select_best(std::span<const ScoredCandidate> candidates, const SelectorSpec& spec) {
  spec.validate();
  if (candidates.empty()) throw ConfigError("select_best: no candidates");
  auto best = argmax_first(
      candidates, [&](const ScoredCandidate& c) { return selector_key(c, spec); },
      [](const ScoredCandidate& c) { return !c.candidate.failed; });
  if (!best) throw GenerationError("select_best: every candidate failed");
  return *best;
}

}  // namespace faithsum
