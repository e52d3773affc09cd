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

// Run configuration: an INI-style file (key = value, [section] headers)
// with command-line overrides applied on top.

#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "faithsum/corpus.hpp"
#include "faithsum/error.hpp"
#include "faithsum/faithful.hpp"
#include "faithsum/generate.hpp"
#include "faithsum/textrank.hpp"

namespace faithsum {

enum class Setting { NoContext, ContextNoSelection, BestOfN };

inline Setting parse_setting(std::string_view s) {
  if (s == "no-context") return Setting::NoContext;
  if (s == "context-no-selection") return Setting::ContextNoSelection;
  if (s == "best-of-n") return Setting::BestOfN;
  throw ConfigError("unknown setting '" + std::string(s) + "'");
}

inline std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::NoContext: return "no-context";
    case Setting::ContextNoSelection: return "context-no-selection";
    case Setting::BestOfN: return "best-of-n";
  }
  return "?";
}

struct ResourcePaths {
  std::filesystem::path gazetteer;
  std::filesystem::path negation;
  std::filesystem::path stopwords;
  std::filesystem::path abbreviations;  // optional
  std::filesystem::path interrogatives;
  std::filesystem::path templates_dir;  // optional; built-in templates otherwise
};

inline const std::vector<double>& default_sweep_temperatures() {
  static const std::vector<double> t{0.1, 0.3, 0.5, 0.7, 0.9};
  return t;
}

struct RunConfig {
  std::filesystem::path source;  // config file, if any
  DatasetManifest dataset;
  ResourcePaths resources;
  TextRankParams textrank;
  std::size_t context_budget = 0;  // 0: max(3, ceil(n/2))
  std::size_t negation_window = kDefaultNegationWindow;
  GenerationParams generation;
  Setting setting = Setting::BestOfN;
  std::string template_id = "default";
  HttpBackendConfig http;
  SelectorSpec selector = SelectorSpec::summac();
  std::string scorer_kind = "stub";  // stub | http
  std::string scorer_url = "http://127.0.0.1:8765";
  std::filesystem::path cache_dir;  // empty: no cache
  std::size_t align_chunk_size = kDefaultAlignChunkSize;
  bool enable_bert = true;
  std::size_t workers = 1;
  std::filesystem::path output_dir = "faithsum-out";
  std::uint64_t seed = 0;
  std::vector<double> temperatures = default_sweep_temperatures();

  // Throws ConfigError naming the first problem found.
  void validate() const {
    auto require = [](const std::filesystem::path& p, const char* what) {
      if (p.empty()) throw ConfigError(std::string("missing path for ") + what);
      if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
    };
    require(dataset.path, "dataset.path");
    require(resources.gazetteer, "resources.gazetteer");
    require(resources.negation, "resources.negation");
    require(resources.stopwords, "resources.stopwords");
    require(resources.interrogatives, "resources.interrogatives");
    if (!resources.abbreviations.empty()) require(resources.abbreviations, "resources.abbreviations");
    if (!resources.templates_dir.empty()) require(resources.templates_dir, "resources.templates_dir");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (align_chunk_size < 1) throw ConfigError("scorer.align_chunk_size must be >= 1");
    if (scorer_kind != "stub" && scorer_kind != "http") throw ConfigError("scorer.kind must be stub or http");
    if (generation.backend_id != "deterministic-mock" && generation.backend_id != "openai-compatible-http")
      throw ConfigError("unknown backend '" + generation.backend_id + "'");
    if (temperatures.empty()) throw ConfigError("temperature list is empty");
    textrank.validate();
    generation.validate();
    selector.validate();
  }

  // Stable textual form of every setting that affects results; hashed into reports.
  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "dataset=" << dataset.name << "|" << dataset.path.filename().string() << "|" << dataset.question_field << "|"
       << dataset.summary_field << "|" << dataset.id_field << "|" << to_string(dataset.language) << "|" << dataset.strict
       << "\ntextrank=" << textrank.damping << "|" << textrank.epsilon << "|" << textrank.max_iterations << "|"
       << context_budget << "\nner.window=" << negation_window << "\ngeneration=" << generation.backend_id << "|"
       << generation.temperature << "|" << generation.n_candidates << "|" << generation.max_output_tokens << "|"
       << http.model << "\nsetting=" << to_string(setting) << "|" << template_id << "\nselector=" << selector_name(selector)
       << "\nscorer=" << scorer_kind << "|" << align_chunk_size << "|" << enable_bert << "\nseed=" << seed << "\n";
    return os.str();
  }

  std::string hash() const { return io::sha256_hex(canonical()).substr(0, 16); }
};

inline std::vector<double> parse_temperature_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    auto t = io::trim(item);
    if (t.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(std::string(t), &used));
      if (used != t.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("invalid temperature '" + std::string(t) + "'");
    }
  }
  return out;
}

namespace detail {

// Like ptree::get(key, fallback) but a present, unparsable value throws
// instead of silently yielding the fallback.
template <typename T>
T get_or(const boost::property_tree::ptree& pt, const std::string& key, T fallback) {
  return pt.get_optional<std::string>(key) ? pt.get<T>(key) : fallback;
}

template <typename Resolve>
DatasetManifest read_manifest(const boost::property_tree::ptree& pt, Resolve&& resolve) {
  DatasetManifest m;
  m.name = pt.get<std::string>("dataset.name", "dataset");
  m.path = resolve(pt.get<std::string>("dataset.path", ""));
  m.format = parse_dataset_format(pt.get<std::string>("dataset.format", "delimited-table"));
  m.question_field = pt.get<std::string>("dataset.question_field", "question");
  m.summary_field = pt.get<std::string>("dataset.summary_field", "summary");
  m.id_field = pt.get<std::string>("dataset.id_field", "");
  m.language = parse_language(pt.get<std::string>("dataset.language", "en"));
  m.strict = get_or<bool>(pt, "dataset.strict", false);
  for (const char* split : {"train", "validation", "test"})
    if (auto p = pt.get_optional<std::string>(std::string("dataset.split_") + split))
      m.split_paths[split] = resolve(*p);
  return m;
}

inline boost::property_tree::ptree read_ini_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(path.string(), pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return pt;
}

}  // namespace detail

inline RunConfig load_config(const std::filesystem::path& path) {
  const auto pt = detail::read_ini_file(path);
  const auto base = std::filesystem::absolute(path).parent_path();
  auto resolve = [&](const std::string& p) -> std::filesystem::path {
    if (p.empty()) return {};
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : (base / fp).lexically_normal();
  };

  RunConfig c;
  c.source = path;
  try {
    c.seed = detail::get_or<std::uint64_t>(pt, "run.seed", 0);
    c.workers = detail::get_or<std::size_t>(pt, "run.workers", 1);
    c.output_dir = resolve(pt.get<std::string>("run.output_dir", "faithsum-out"));

    c.dataset = detail::read_manifest(pt, resolve);

    c.resources.gazetteer = resolve(pt.get<std::string>("resources.gazetteer", ""));
    c.resources.negation = resolve(pt.get<std::string>("resources.negation", ""));
    c.resources.stopwords = resolve(pt.get<std::string>("resources.stopwords", ""));
    c.resources.abbreviations = resolve(pt.get<std::string>("resources.abbreviations", ""));
    c.resources.interrogatives = resolve(pt.get<std::string>("resources.interrogatives", ""));
    c.resources.templates_dir = resolve(pt.get<std::string>("resources.templates_dir", ""));

    c.textrank.damping = detail::get_or<double>(pt, "textrank.damping", 0.85);
    c.textrank.epsilon = detail::get_or<double>(pt, "textrank.epsilon", 1e-6);
    c.textrank.max_iterations = detail::get_or<int>(pt, "textrank.max_iterations", 100);
    c.context_budget = detail::get_or<std::size_t>(pt, "textrank.budget", 0);
    c.negation_window = detail::get_or<std::size_t>(pt, "ner.window", kDefaultNegationWindow);

    c.generation.backend_id = pt.get<std::string>("generation.backend", "deterministic-mock");
    c.generation.temperature = detail::get_or<double>(pt, "generation.temperature", 0.7);
    c.generation.n_candidates = detail::get_or<int>(pt, "generation.n_candidates", 3);
    c.generation.max_output_tokens = detail::get_or<int>(pt, "generation.max_output_tokens", 64);
    c.setting = parse_setting(pt.get<std::string>("generation.setting", "best-of-n"));
    c.template_id = pt.get<std::string>("generation.template", "default");
    c.http.base_url = pt.get<std::string>("generation.base_url", c.http.base_url);
    c.http.model = pt.get<std::string>("generation.model", c.http.model);
    c.http.max_attempts = detail::get_or<int>(pt, "generation.max_attempts", 3);
    c.http.backoff_initial_ms = detail::get_or<int>(pt, "generation.backoff_ms", 250);
    if (auto t = pt.get_optional<std::string>("generation.temperatures")) c.temperatures = parse_temperature_list(*t);

    c.selector = parse_selector(pt.get<std::string>("selector.kind", "summac"), pt.get<std::string>("selector.rouge1_target", "source"));

    c.scorer_kind = pt.get<std::string>("scorer.kind", "stub");
    c.scorer_url = pt.get<std::string>("scorer.base_url", c.scorer_url);
    c.cache_dir = resolve(pt.get<std::string>("scorer.cache_dir", ""));
    c.align_chunk_size = detail::get_or<std::size_t>(pt, "scorer.align_chunk_size", kDefaultAlignChunkSize);
    c.enable_bert = detail::get_or<bool>(pt, "scorer.bertscore", true);
  } catch (const boost::property_tree::ptree_bad_data& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.generation.seed = c.seed;
  return c;
}

// A file holding only a [dataset] section. `path_override`, when set,
// replaces the dataset path.
inline DatasetManifest load_manifest(const std::filesystem::path& path,
                                     const std::filesystem::path& path_override = {}) {
  const auto pt = detail::read_ini_file(path);
  const auto base = std::filesystem::absolute(path).parent_path();
  try {
    auto m = detail::read_manifest(pt, [&](const std::string& p) -> std::filesystem::path {
      if (p.empty()) return {};
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : (base / fp).lexically_normal();
    });
    if (!path_override.empty()) m.path = path_override;
    return m;
  } catch (const boost::property_tree::ptree_bad_data& e) {
    throw ConfigError(std::string("bad manifest value: ") + e.what());
  }
}

}  // namespace faithsum
