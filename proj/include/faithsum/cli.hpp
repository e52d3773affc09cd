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

// Command-line front end. tools/faithsum.cpp is a thin main() around run_cli
// so that tests can drive every command in-process.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faithsum/config.hpp"
#include "faithsum/pipeline.hpp"

namespace faithsum {

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<std::string> selector;
  std::optional<std::string> rouge1_target;
  std::optional<std::string> setting;
  std::optional<std::string> temperatures;
  std::optional<std::string> scorer_url;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> workers;
  bool strict = false;
};

inline RunConfig resolve_config(const CliOverrides& o) {
  auto cfg = load_config(o.config_path);
  if (o.seed) cfg.seed = cfg.generation.seed = *o.seed;
  if (o.backend) cfg.generation.backend_id = *o.backend;
  if (o.selector) cfg.selector = parse_selector(*o.selector, o.rouge1_target.value_or("source"));
  else if (o.rouge1_target && cfg.selector.kind == SelectorKind::Rouge1) cfg.selector = parse_selector("rouge1", *o.rouge1_target);
  if (o.setting) cfg.setting = parse_setting(*o.setting);
  if (o.temperatures) cfg.temperatures = parse_temperature_list(*o.temperatures);
  if (const char* env = std::getenv("FAITHSUM_SCORER_URL"); env && *env) {
    cfg.scorer_url = env;
    cfg.scorer_kind = "http";
  }
  if (o.scorer_url) {
    cfg.scorer_url = *o.scorer_url;
    cfg.scorer_kind = "http";
  }
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (o.workers) cfg.workers = *o.workers;
  if (o.strict) cfg.dataset.strict = true;
  cfg.validate();
  return cfg;
}

// Builds the scorer stack (HTTP probe, optional cache). The returned
// pointer owns everything it references.
struct ScorerStack {
  std::unique_ptr<ScorerClient> base;
  std::unique_ptr<ScorerClient> cached;
  const ScorerClient& get() const { return cached ? *cached : *base; }
};

inline ScorerStack make_scorer(const RunConfig& cfg) {
  ScorerStack s;
  if (cfg.scorer_kind == "http") {
    auto http = std::make_unique<HttpScorerClient>(cfg.scorer_url);
    const auto h = http->health();
    if (!h.ready) throw UnreachableError("scorer at " + cfg.scorer_url + " is not ready");
    s.base = std::move(http);
  } else {
    s.base = std::make_unique<LexicalStubScorer>();
  }
  if (!cfg.cache_dir.empty()) s.cached = std::make_unique<CachingScorer>(*s.base, cfg.cache_dir);
  return s;
}

inline int cmd_ingest(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto records = load_records(cfg, err);
  io::write_file(cfg.output_dir / "records.jsonl", to_record_lines(records));
  out << records.size() << " records written to " << (cfg.output_dir / "records.jsonl").string() << "\n";
  return kExitOk;
}

inline int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg);
  const auto records = load_records(cfg, err);
  std::vector<std::string> lines(records.size());
  parallel_for(records.size(), cfg.workers,
               [&](std::size_t i) { lines[i] = extraction_json(records[i], p.extract(records[i])).dump(); });
  std::string body;
  for (const auto& l : lines) body += l + "\n";
  io::write_file(cfg.output_dir / "extract.jsonl", body);
  out << records.size() << " extraction records written to " << (cfg.output_dir / "extract.jsonl").string() << "\n";
  return kExitOk;
}

inline int cmd_export_ft(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg);
  const auto records = load_records(cfg, err);
  std::vector<FtExample> examples(records.size());
  parallel_for(records.size(), cfg.workers, [&](std::size_t i) {
    examples[i] = {records[i], p.prompt_for(records[i], p.extract(records[i]))};
  });
  const auto path = cfg.output_dir / "ft_pairs.jsonl";
  const auto res = export_ft_pairs(examples, path);
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  out << res.written << " fine-tuning pairs written to " << path.string() << "\n";
  return kExitOk;
}

inline int cmd_evaluate(const RunConfig& cfg, std::string_view command, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg);
  const auto records = load_records(cfg, err);
  const auto scorer = make_scorer(cfg);
  const auto backend = make_backend(cfg);
  const auto rep = run_evaluate(p, records, {backend.get(), &scorer.get()}, cfg.output_dir, command);
  out << render_table({{setting_label(p), rep.means}}, cfg.dataset.language);
  if (!rep.message.empty()) err << rep.message << "\n";
  return rep.exit_code;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Pipeline p(cfg);  // validates resources before any work
  const auto records = load_records(cfg, err);
  const auto scorer = make_scorer(cfg);
  int code = kExitOk;
  const auto rows = run_sweep(cfg, records, scorer.get(), cfg.output_dir, code);
  out << io::read_file(cfg.output_dir / "sweep_table.txt");
  for (const auto& r : rows)
    if (!r.error.empty()) err << "t=" << temperature_label(r.temperature) << ": " << r.error << "\n";
  return code;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"faithsum: faithful consumer-health-question summarization pipeline"};
  app.require_subcommand(1);
  CliOverrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", o.config_path, "Run configuration file")->required();
    sub->add_option("--seed", o.seed, "Seed for every random choice");
    sub->add_option("--output-dir,-o", o.output_dir, "Output directory");
    sub->add_option("--workers", o.workers, "Record-level worker threads");
    sub->add_flag("--strict", o.strict, "Treat malformed dataset rows as fatal");
  };
  auto add_generation = [&](CLI::App* sub) {
    sub->add_option("--backend", o.backend, "deterministic-mock | openai-compatible-http");
    sub->add_option("--selector", o.selector, "summac | rouge1 | entity");
    sub->add_option("--rouge1-target", o.rouge1_target, "source | reference");
    sub->add_option("--setting", o.setting, "no-context | context-no-selection | best-of-n");
    sub->add_option("--scorer-url", o.scorer_url, "Base URL of the scorer sidecar (default: in-process stub)");
  };

  auto* ingest = app.add_subcommand("ingest", "Load and normalize the dataset");
  auto* extract = app.add_subcommand("extract", "Dump sentences, TextRank scores, entities and selected context");
  auto* summarize = app.add_subcommand("summarize", "Generate candidates and keep the selected summary");
  auto* evaluate = app.add_subcommand("evaluate", "Summarize and score against references");
  auto* sweep = app.add_subcommand("sweep", "Evaluate once per sampling temperature");
  auto* export_ft = app.add_subcommand("export-ft", "Write (prompt, reference) fine-tuning pairs");
  for (auto* s : {ingest, extract, summarize, evaluate, sweep, export_ft}) add_common(s);
  for (auto* s : {summarize, evaluate, sweep}) add_generation(s);
  sweep->add_option("--temperatures", o.temperatures, "Comma-separated temperatures (default 0.1,0.3,0.5,0.7,0.9)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const auto cfg = resolve_config(o);
    if (ingest->parsed()) return cmd_ingest(cfg, out, err);
    if (extract->parsed()) return cmd_extract(cfg, out, err);
    if (export_ft->parsed()) return cmd_export_ft(cfg, out, err);
    if (summarize->parsed()) return cmd_evaluate(cfg, "summarize", out, err);
    if (evaluate->parsed()) return cmd_evaluate(cfg, "evaluate", out, err);
    if (sweep->parsed()) return cmd_sweep(cfg, out, err);
  } catch (const UnreachableError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreachable;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ServiceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUnreachable;
  }
  return kExitConfig;
}

}  // namespace faithsum
