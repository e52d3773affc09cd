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

// End-to-end orchestration: extraction, generation, scoring, selection and
// report writing. Records are processed in parallel; outputs are always
// assembled in record order.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "faithsum/config.hpp"
#include "faithsum/corpus.hpp"
#include "faithsum/faithful.hpp"
#include "faithsum/generate.hpp"
#include "faithsum/medner.hpp"
#include "faithsum/metrics.hpp"
#include "faithsum/textproc.hpp"
#include "faithsum/textrank.hpp"

namespace faithsum {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitPartial = 2, kExitUnreachable = 3 };

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
}

struct Extraction {
  std::vector<SentenceSpan> sentences;
  std::vector<std::vector<Token>> tokens;
  RankResult rank;
  std::vector<EntityMention> mentions;
  ExtractiveContext context;

  std::vector<std::string> context_sentences() const {
    std::vector<std::string> out;
    for (auto i : context.selected) out.push_back(sentences[i].text);
    return out;
  }
};

// Loaded, immutable resources shared by every record of a run.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const Language lang = cfg_.dataset.language;
    lexicons_ = load_lexicons(cfg_.resources.gazetteer, cfg_.resources.negation, lang);
    stopwords_ = load_word_list(cfg_.resources.stopwords, lang);
    interrogatives_ = load_word_list(cfg_.resources.interrogatives, lang);
    abbreviations_ = cfg_.resources.abbreviations.empty() ? builtin_abbreviations()
                                                          : load_word_list(cfg_.resources.abbreviations, lang);
    templates_ = TemplateLibrary::builtin();
    if (!cfg_.resources.templates_dir.empty()) templates_.load_directory(cfg_.resources.templates_dir);
    (void)templates_.get(effective_template_id(), lang);
  }

  const RunConfig& config() const { return cfg_; }
  const Lexicons& lexicons() const { return lexicons_; }
  const WordList& stopwords() const { return stopwords_; }
  const TemplateLibrary& templates() const { return templates_; }

  NerResources ner() const {
    return {&lexicons_.gazetteer, &lexicons_.negation, cfg_.negation_window, &abbreviations_};
  }

  std::string effective_template_id() const {
    return cfg_.setting == Setting::NoContext && cfg_.template_id == "default" ? "no-context" : cfg_.template_id;
  }

  int effective_candidates() const { return cfg_.setting == Setting::BestOfN ? cfg_.generation.n_candidates : 1; }

  Extraction extract(const ChqRecord& record) const {
    Extraction x;
    const Language lang = record.language;
    x.sentences = segment_sentences(record.question, lang, abbreviations_);
    for (const auto& s : x.sentences) {
      x.tokens.push_back(tokenize(s.text, lang));
      auto m = tag_entities(x.tokens.back(), lexicons_.gazetteer, lexicons_.negation, cfg_.negation_window, s.index);
      x.mentions.insert(x.mentions.end(), m.begin(), m.end());
    }
    x.rank = rank(build_similarity_graph(x.tokens, stopwords_), cfg_.textrank);
    const auto query = query_terms(x.sentences, x.tokens, interrogatives_, stopwords_);
    const std::size_t budget = cfg_.context_budget ? cfg_.context_budget : default_context_budget(x.sentences.size());
    x.context = select_context(x.tokens, x.rank.scores, x.mentions, query, budget);
    return x;
  }

  Prompt prompt_for(const ChqRecord& record, const Extraction& x) const {
    return build_prompt(record, x.context_sentences(), templates_, effective_template_id());
  }

 private:
  RunConfig cfg_;
  Lexicons lexicons_;
  WordList stopwords_;
  WordList interrogatives_;
  WordList abbreviations_;
  TemplateLibrary templates_;
};

inline nlohmann::json to_json(const EntityMention& m) {
  return {{"id", m.canonical_id}, {"surface", m.surface},          {"sentence", m.sentence_index},
          {"token_start", m.token_start}, {"token_end", m.token_end}, {"negated", m.negated}};
}

inline nlohmann::json extraction_json(const ChqRecord& r, const Extraction& x) {
  nlohmann::json j;
  j["id"] = r.id;
  j["language"] = to_string(r.language);
  j["sentences"] = nlohmann::json::array();
  for (std::size_t i = 0; i < x.sentences.size(); ++i)
    j["sentences"].push_back({{"index", i}, {"text", x.sentences[i].text}, {"score", x.rank.scores[i]}});
  j["textrank_iterations"] = x.rank.iterations;
  j["mentions"] = nlohmann::json::array();
  for (const auto& m : x.mentions) j["mentions"].push_back(to_json(m));
  j["context"] = nlohmann::json::array();
  for (std::size_t k = 0; k < x.context.selected.size(); ++k)
    j["context"].push_back({{"index", x.context.selected[k]},
                            {"text", x.sentences[x.context.selected[k]].text},
                            {"reason", to_string(x.context.reasons[k])}});
  return j;
}

// ---------------------------------------------------------------------------
// Per-record processing

struct RecordOutcome {
  ChqRecord record;
  std::vector<ScoredCandidate> candidates;
  std::optional<std::size_t> selected;
  std::string error;  // non-empty on record-level failure
  bool unreachable = false;

  bool ok() const { return selected.has_value(); }
  const ScoredCandidate& chosen() const { return candidates[*selected]; }
};

struct RunServices {
  const GenerationBackend* backend = nullptr;
  const ScorerClient* scorer = nullptr;
};

inline RecordOutcome process_record(const Pipeline& p, const ChqRecord& record, const RunServices& svc,
                                    const GenerationParams& params) {
  RecordOutcome out;
  out.record = record;
  try {
    const auto x = p.extract(record);
    const auto prompt = p.prompt_for(record, x);
    auto gp = params;
    gp.n_candidates = p.effective_candidates();
    // Per-record seed so that records are independent of processing order.
    gp.seed = std::stoull(io::sha256_hex(std::to_string(params.seed) + '\x1f' + record.id).substr(0, 16), nullptr, 16);
    auto candidates = generate_candidates(prompt, gp, *svc.backend);

    ScoringOptions opt{svc.scorer, p.ner(), p.config().align_chunk_size, p.config().enable_bert};
    const auto source_words = word_forms(tokenize(record.question, record.language));
    for (auto& c : candidates) {
      ScoredCandidate sc;
      if (!c.failed) {
        sc.report = score_summary(record, c.text, opt);
        sc.r1_vs_source = rouge_n(word_forms(tokenize(c.text, record.language)), source_words, 1).f1;
      }
      sc.candidate = std::move(c);
      out.candidates.push_back(std::move(sc));
    }
    out.selected = select_best(out.candidates, p.config().selector);
  } catch (const UnreachableError& e) {
    out.error = e.what();
    out.unreachable = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus summary and rendering

struct CorpusMeans {
  std::size_t records = 0;
  std::size_t failures = 0;
  std::optional<double> r1, r2, rl, bert, fre;
  double summac = 0.0;
  double align = 0.0;
  double entity_retention = 0.0;
  double negation_consistent_rate = 0.0;
  double candidate_diversity = 0.0;
};

inline CorpusMeans corpus_means(const std::vector<RecordOutcome>& outcomes) {
  CorpusMeans m;
  m.records = outcomes.size();
  double r1 = 0, r2 = 0, rl = 0, bert = 0, fre_sum = 0, div = 0;
  std::size_t n_ok = 0, n_rouge = 0, n_bert = 0, n_fre = 0;
  for (const auto& o : outcomes) {
    if (!o.ok()) {
      ++m.failures;
      continue;
    }
    ++n_ok;
    const auto& rep = o.chosen().report;
    if (rep.r1) {
      r1 += rep.r1->f1;
      r2 += rep.r2->f1;
      rl += rep.rl->f1;
      ++n_rouge;
    }
    if (rep.bert_f1) bert += *rep.bert_f1, ++n_bert;
    if (rep.fre) fre_sum += *rep.fre, ++n_fre;
    m.summac += rep.summac_zs;
    m.align += rep.align;
    m.entity_retention += rep.entity_retention;
    m.negation_consistent_rate += rep.negation_consistent ? 1.0 : 0.0;
    std::vector<std::string> texts;
    for (const auto& c : o.candidates)
      if (!c.candidate.failed) texts.push_back(c.candidate.text);
    div += mean_pairwise_edit_distance(texts);
  }
  if (n_rouge) m.r1 = r1 / n_rouge, m.r2 = r2 / n_rouge, m.rl = rl / n_rouge;
  if (n_bert) m.bert = bert / n_bert;
  if (n_fre) m.fre = fre_sum / n_fre;
  if (n_ok) {
    const double n = static_cast<double>(n_ok);
    m.summac /= n;
    m.align /= n;
    m.entity_retention /= n;
    m.negation_consistent_rate /= n;
    m.candidate_diversity = div / n;
  }
  return m;
}

inline nlohmann::json to_json(const CorpusMeans& m) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {{"records", m.records},
          {"failures", m.failures},
          {"r1", opt(m.r1)},
          {"r2", opt(m.r2)},
          {"rl", opt(m.rl)},
          {"bert_f1", opt(m.bert)},
          {"fre", opt(m.fre)},
          {"summac_zs", m.summac},
          {"align", m.align},
          {"align_x100", m.align * 100.0},
          {"entity_retention", m.entity_retention},
          {"negation_consistent_rate", m.negation_consistent_rate},
          {"candidate_diversity", m.candidate_diversity}};
}

inline std::string format_fixed(std::optional<double> v, int precision) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, *v);
  return buf;
}

inline std::vector<std::string> table_columns(Language lang) {
  if (lang == Language::English) return {"R1", "R2", "RL", "BERT", "Read.", "SummaC", "Align"};
  return {"R1", "R2", "RL", "BERT", "SummaC", "Align"};
}

// Rows of (label, means) rendered with ROUGE and Align in percent.
inline std::string render_table(const std::vector<std::pair<std::string, CorpusMeans>>& rows, Language lang,
                                std::string_view first_header = "Setting") {
  const auto cols = table_columns(lang);
  std::size_t label_w = first_header.size();
  for (const auto& [label, m] : rows) label_w = std::max(label_w, label.size());
  std::ostringstream os;
  auto cell = [&](std::string_view s) {
    os << ' ';
    for (std::size_t i = s.size(); i < 7; ++i) os << ' ';
    os << s;
  };
  os << first_header << std::string(label_w - first_header.size(), ' ');
  for (const auto& c : cols) cell(c);
  os << '\n';
  auto pct = [](std::optional<double> v) { return v ? std::optional<double>(*v * 100.0) : std::nullopt; };
  for (const auto& [label, m] : rows) {
    os << label << std::string(label_w - label.size(), ' ');
    cell(format_fixed(pct(m.r1), 2));
    cell(format_fixed(pct(m.r2), 2));
    cell(format_fixed(pct(m.rl), 2));
    cell(format_fixed(m.bert, 2));
    if (lang == Language::English) cell(format_fixed(m.fre, 2));
    cell(format_fixed(m.summac, 2));
    cell(format_fixed(m.align * 100.0, 2));
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands

struct RunReport {
  int exit_code = kExitOk;
  std::string message;
  CorpusMeans means;
  std::vector<RecordOutcome> outcomes;
};

inline std::string setting_label(const Pipeline& p) {
  const auto& c = p.config();
  switch (c.setting) {
    case Setting::NoContext: return "no-context";
    case Setting::ContextNoSelection: return "context (no selection)";
    case Setting::BestOfN:
      return "best-of-" + std::to_string(c.generation.n_candidates) + " (" + selector_name(c.selector) + ")";
  }
  return "?";
}

inline nlohmann::json run_header(const Pipeline& p, std::string_view command) {
  const auto& c = p.config();
  const auto& tmpl = p.templates().get(p.effective_template_id(), c.dataset.language);
  return {{"kind", "run"},
          {"command", command},
          {"config_hash", c.hash()},
          {"dataset", c.dataset.name},
          {"language", to_string(c.dataset.language)},
          {"gazetteer", p.lexicons().gazetteer.source_name},
          {"gazetteer_version", p.lexicons().gazetteer.version},
          {"template_id", tmpl.id},
          {"template_version", tmpl.version},
          {"setting", to_string(c.setting)},
          {"selector", selector_name(c.selector)},
          {"backend", c.generation.backend_id},
          {"temperature", c.generation.temperature},
          {"n_candidates", p.effective_candidates()},
          {"seed", c.seed}};
}

inline nlohmann::json outcome_json(const RecordOutcome& o) {
  nlohmann::json j;
  j["kind"] = "record";
  j["id"] = o.record.id;
  if (!o.ok()) {
    j["error"] = o.error;
    return j;
  }
  j["selected_index"] = *o.selected;
  j["summary"] = o.chosen().candidate.text;
  j["scores"] = to_json(o.chosen().report);
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : o.candidates) {
    nlohmann::json cj{{"index", c.candidate.index}, {"retries", c.candidate.retries}, {"failed", c.candidate.failed}};
    if (c.candidate.failed) {
      cj["error"] = c.candidate.error;
    } else {
      cj["text"] = c.candidate.text;
      cj["r1_vs_source"] = c.r1_vs_source;
      cj["scores"] = to_json(c.report);
    }
    j["candidates"].push_back(std::move(cj));
  }
  return j;
}

inline std::unique_ptr<GenerationBackend> make_backend(const RunConfig& c) {
  if (c.generation.backend_id == "deterministic-mock") return std::make_unique<MockBackend>();
  auto http = c.http;
  if (const char* key = std::getenv("FAITHSUM_API_KEY")) http.api_key = key;
  return std::make_unique<OpenAiHttpBackend>(http);
}

inline std::vector<ChqRecord> load_records(const RunConfig& c, std::ostream& log) {
  auto loaded = load_dataset(c.dataset);
  for (const auto& issue : loaded.rejected)
    log << "warning: " << c.dataset.path.filename().string() << " row " << issue.row << ": " << issue.reason << "\n";
  log << "loaded " << loaded.records.size() << " records (" << loaded.rejected.size() << " rejected of "
      << loaded.source_rows << " rows)\n";
  return std::move(loaded.records);
}

// Generates, scores and selects for every record, then writes
// <output_dir>/evaluate.jsonl and <output_dir>/evaluate_table.txt.
inline RunReport run_evaluate(const Pipeline& p, const std::vector<ChqRecord>& records, const RunServices& svc,
                              const std::filesystem::path& output_dir, std::string_view command = "evaluate") {
  RunReport rep;
  rep.outcomes.resize(records.size());
  parallel_for(records.size(), p.config().workers,
               [&](std::size_t i) { rep.outcomes[i] = process_record(p, records[i], svc, p.config().generation); });

  std::string lines = run_header(p, command).dump() + "\n";
  std::size_t unreachable = 0;
  for (const auto& o : rep.outcomes) {
    lines += outcome_json(o).dump() + "\n";
    unreachable += o.unreachable ? 1 : 0;
  }
  rep.means = corpus_means(rep.outcomes);
  nlohmann::json summary = to_json(rep.means);
  summary["kind"] = "summary";
  lines += summary.dump() + "\n";

  io::write_file(output_dir / (std::string(command) + ".jsonl"), lines);
  io::write_file(output_dir / (std::string(command) + "_table.txt"),
                 render_table({{setting_label(p), rep.means}}, p.config().dataset.language));

  if (unreachable > 0) {
    rep.exit_code = kExitUnreachable;
    rep.message = "generation backend unreachable for " + std::to_string(unreachable) + " record(s)";
  } else if (rep.means.failures > 0) {
    rep.exit_code = kExitPartial;
    rep.message = std::to_string(rep.means.failures) + " of " + std::to_string(rep.means.records) + " record(s) failed";
  }
  return rep;
}

inline std::string temperature_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

struct SweepRow {
  double temperature = 0.0;
  std::optional<CorpusMeans> means;
  int exit_code = kExitOk;
  std::string error;
};

// One evaluate run per temperature under <output_dir>/t<temperature>/,
// plus sweep.jsonl and sweep_table.txt. A failing temperature is recorded
// and the sweep carries on.
inline std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<ChqRecord>& records,
                                       const ScorerClient& scorer, const std::filesystem::path& output_dir,
                                       int& exit_code) {
  std::vector<SweepRow> rows;
  exit_code = kExitOk;
  std::string lines;
  std::vector<std::pair<std::string, CorpusMeans>> table_rows;
  for (double t : base.temperatures) {
    SweepRow row;
    row.temperature = t;
    try {
      auto cfg = base;
      cfg.generation.temperature = t;
      Pipeline p(cfg);
      auto backend = make_backend(cfg);
      auto rep = run_evaluate(p, records, {backend.get(), &scorer}, output_dir / ("t" + temperature_label(t)));
      row.means = rep.means;
      row.exit_code = rep.exit_code;
      row.error = rep.message;
    } catch (const Error& e) {
      row.exit_code = kExitPartial;
      row.error = e.what();
    }
    exit_code = std::max(exit_code, row.exit_code);
    nlohmann::json j{{"kind", "sweep-row"}, {"temperature", t}, {"exit_code", row.exit_code}};
    if (row.means) {
      j["means"] = to_json(*row.means);
      table_rows.emplace_back("t=" + temperature_label(t), *row.means);
    }
    if (!row.error.empty()) j["error"] = row.error;
    lines += j.dump() + "\n";
    rows.push_back(std::move(row));
  }
  io::write_file(output_dir / "sweep.jsonl", lines);
  io::write_file(output_dir / "sweep_table.txt", render_table(table_rows, base.dataset.language, "Temperature"));
  return rows;
}

}  // namespace faithsum
