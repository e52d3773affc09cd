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

// Prompt construction, candidate generation through pluggable backends,
// and fine-tuning pair export.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "faithsum/corpus.hpp"
#include "faithsum/error.hpp"
#include "faithsum/io.hpp"
#include "faithsum/textproc.hpp"

namespace faithsum {

// ---------------------------------------------------------------------------
// Prompt templates

// A template has a system part and a user part. The user part may hold the
// placeholders {{question}} and {{context}}; when both occur, the question
// must come first. Substitution is single-pass, so placeholder text inside
// substituted values is left alone.
struct PromptTemplate {
  std::string id;
  std::string version;
  Language language = Language::English;
  std::string system_text;
  std::string user_text;
};

struct Prompt {
  std::string system_text;
  std::string user_text;
  Language language = Language::English;
  std::string template_id;
  std::string template_version;
  std::string question;
  std::vector<std::string> context_sentences;  // document order
};

inline constexpr std::string_view kQuestionSlot = "{{question}}";
inline constexpr std::string_view kContextSlot = "{{context}}";

inline PromptTemplate parse_prompt_template(std::string_view text, Language lang, std::string fallback_id = {}) {
  PromptTemplate t;
  t.id = std::move(fallback_id);
  t.language = lang;
  t.version = "1";
  std::vector<std::string> system_lines, user_lines;
  std::vector<std::string>* lines = nullptr;
  for (const auto& line : io::split_lines(text)) {
    if (lines == nullptr && line.starts_with("#")) {
      auto body = io::trim(std::string_view(line).substr(1));
      if (body.starts_with("id:")) t.id = std::string(io::trim(body.substr(3)));
      else if (body.starts_with("version:")) t.version = std::string(io::trim(body.substr(8)));
      continue;
    }
    if (line == "[system]") {
      lines = &system_lines;
      continue;
    }
    if (line == "[user]") {
      lines = &user_lines;
      continue;
    }
    if (lines) lines->push_back(line);
  }
  auto join = [](std::vector<std::string> v) {
    while (!v.empty() && io::trim(v.back()).empty()) v.pop_back();
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "\n" : "") + v[i];
    return out;
  };
  t.system_text = join(system_lines);
  t.user_text = join(user_lines);
  if (t.id.empty()) throw ConfigError("prompt template has no id");
  if (t.user_text.find(kQuestionSlot) == std::string::npos)
    throw ConfigError("prompt template '" + t.id + "' lacks {{question}}");
  const auto q = t.user_text.find(kQuestionSlot);
  const auto c = t.user_text.find(kContextSlot);
  if (c != std::string::npos && c < q) throw ConfigError("prompt template '" + t.id + "': {{context}} precedes {{question}}");
  return t;
}

class TemplateLibrary {
 public:
  void add(PromptTemplate t) {
    auto key = std::make_pair(t.id, t.language);
    templates_.insert_or_assign(std::move(key), std::move(t));
  }

  const PromptTemplate& get(const std::string& id, Language lang) const {
    auto it = templates_.find({id, lang});
    if (it == templates_.end())
      throw ConfigError("unknown prompt template '" + id + "' for language " + std::string(to_string(lang)));
    return it->second;
  }

  // Loads every "<id>.<lang>.txt" file in `dir`, overriding same-named entries.
  void load_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ConfigError("template directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      const auto stem = p.stem().string();  // "<id>.<lang>"
      const auto dot = stem.rfind('.');
      if (dot == std::string::npos) continue;
      add(parse_prompt_template(io::read_file(p), parse_language(stem.substr(dot + 1)), stem.substr(0, dot)));
    }
  }

  static TemplateLibrary builtin();

 private:
  std::map<std::pair<std::string, Language>, PromptTemplate> templates_;
};

inline TemplateLibrary TemplateLibrary::builtin() {
  TemplateLibrary lib;
  lib.add(parse_prompt_template(R"(# id: default
# version: 1
[system]
You summarize consumer health questions. Your summaries are faithful to the question.
[user]
Question:
{{question}}

Relevant sentences:
{{context}}

Write a one-sentence summary of the question. Keep every medical entity and every negation that appears in the question. Do not add facts that the question does not state.)",
                                Language::English));
  lib.add(parse_prompt_template(R"(# id: no-context
# version: 1
[system]
You summarize consumer health questions.
[user]
Question:
{{question}}

Write a one-sentence summary of the question.)",
                                Language::English));
  lib.add(parse_prompt_template(R"(# id: default
# version: 1
[system]
আপনি রোগীদের স্বাস্থ্য-বিষয়ক প্রশ্নের বিশ্বস্ত সারাংশ লেখেন।
[user]
প্রশ্ন:
{{question}}

প্রাসঙ্গিক বাক্য:
{{context}}

প্রশ্নটির এক বাক্যের একটি সারাংশ লিখুন। প্রশ্নে থাকা সব চিকিৎসা-সংক্রান্ত বিষয় এবং সব না-বাচক তথ্য রাখুন। প্রশ্নে নেই এমন কোনো তথ্য যোগ করবেন না।)",
                                Language::Bangla));
  lib.add(parse_prompt_template(R"(# id: no-context
# version: 1
[system]
আপনি রোগীদের স্বাস্থ্য-বিষয়ক প্রশ্নের সারাংশ লেখেন।
[user]
প্রশ্ন:
{{question}}

প্রশ্নটির এক বাক্যের একটি সারাংশ লিখুন।)",
                                Language::Bangla));
  return lib;
}

inline std::string render_context_block(const std::vector<std::string>& sentences) {
  std::string out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (i) out.push_back('\n');
    out += "- ";
    out += sentences[i];
  }
  return out;
}

inline Prompt build_prompt(const ChqRecord& record, const std::vector<std::string>& context_sentences,
                           const PromptTemplate& tmpl) {
  const bool wants_context = tmpl.user_text.find(kContextSlot) != std::string::npos;
  if (wants_context && context_sentences.empty()) throw ConfigError("build_prompt: empty context");
  if (tmpl.language != record.language) throw ConfigError("build_prompt: template language does not match record");
  for (const auto& s : context_sentences)
    if (s.find('\n') != std::string::npos) throw ConfigError("build_prompt: context sentence contains a newline");

  Prompt p;
  p.system_text = tmpl.system_text;
  p.language = record.language;
  p.template_id = tmpl.id;
  p.template_version = tmpl.version;
  p.question = record.question;
  p.context_sentences = context_sentences;

  const std::string_view u = tmpl.user_text;
  std::size_t pos = 0;
  while (pos < u.size()) {
    const auto q = u.find(kQuestionSlot, pos);
    const auto c = u.find(kContextSlot, pos);
    const auto next = std::min(q, c);
    if (next == std::string_view::npos) {
      p.user_text.append(u.substr(pos));
      break;
    }
    p.user_text.append(u.substr(pos, next - pos));
    if (next == q) {
      p.user_text += record.question;
      pos = q + kQuestionSlot.size();
    } else {
      p.user_text += render_context_block(context_sentences);
      pos = c + kContextSlot.size();
    }
  }
  return p;
}

inline Prompt build_prompt(const ChqRecord& record, const std::vector<std::string>& context_sentences,
                           const TemplateLibrary& library, const std::string& template_id) {
  return build_prompt(record, context_sentences, library.get(template_id, record.language));
}

// Recovers the context sentences from a rendered user text, given the
// template and question it was built from.
inline std::vector<std::string> extract_context(std::string_view user_text, const PromptTemplate& tmpl,
                                                std::string_view question) {
  const std::string_view u = tmpl.user_text;
  const auto c = u.find(kContextSlot);
  if (c == std::string_view::npos) return {};
  // Everything before {{context}} renders to a prefix of fixed length.
  const std::size_t prefix_len = c - kQuestionSlot.size() + question.size();
  const std::size_t suffix_len = u.size() - (c + kContextSlot.size());
  if (user_text.size() < prefix_len + suffix_len) throw DataError("extract_context: text shorter than template");
  std::string_view block = user_text.substr(prefix_len, user_text.size() - prefix_len - suffix_len);
  std::vector<std::string> out;
  for (const auto& line : io::split_lines(block)) {
    if (!line.starts_with("- ")) throw DataError("extract_context: malformed context line");
    out.push_back(line.substr(2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Backends

struct GenerationParams {
  double temperature = 0.7;
  int n_candidates = 3;
  int max_output_tokens = 64;
  std::uint64_t seed = 0;  // mock backend only
  std::string backend_id = "deterministic-mock";

  void validate() const {
    if (n_candidates < 1) throw ConfigError("n_candidates must be >= 1");
    if (!(temperature >= 0.0 && temperature <= 2.0)) throw ConfigError("temperature must lie in [0, 2]");
    if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be >= 1");
  }
};

struct Completion {
  std::string text;
  int retries = 0;  // transport-level re-sends
};

// Thrown by a backend once its own retry budget is spent.
class BackendFailure : public Error {
 public:
  BackendFailure(const std::string& what, int retries, bool unreachable)
      : Error(what), retries_(retries), unreachable_(unreachable) {}
  int retries() const noexcept { return retries_; }
  bool unreachable() const noexcept { return unreachable_; }

 private:
  int retries_;
  bool unreachable_;
};

class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  virtual std::string id() const = 0;
  // Must be safe to call concurrently.
  virtual Completion complete(const Prompt& prompt, const GenerationParams& params, std::size_t index) const = 0;
};

// Deterministic stand-in for a sampled model. The output is the prompt's
// context sentences (or the question's sentences when there is no
// context) in a perturbed order, cut to max_output_tokens words. Sentence i
// gets the sort key i + 4 * t * u_i with u_i uniform in [0, 1) drawn from
// (user text, seed, index), so at t <= 0.25 the order never changes and
// the set of swapped pairs only grows with t.
class MockBackend final : public GenerationBackend {
 public:
  std::string id() const override { return "deterministic-mock"; }

  Completion complete(const Prompt& prompt, const GenerationParams& params, std::size_t index) const override {
    std::vector<std::string> sentences = prompt.context_sentences;
    if (sentences.empty())
      for (auto& s : segment_sentences(prompt.question, prompt.language)) sentences.push_back(std::move(s.text));

    const auto digest = io::sha256_hex(prompt.user_text + '\x1f' + std::to_string(params.seed) + '\x1f' + std::to_string(index));
    std::mt19937_64 rng(std::stoull(digest.substr(0, 16), nullptr, 16));
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      keyed.emplace_back(static_cast<double>(i) + 4.0 * params.temperature * u, i);
    }
    std::stable_sort(keyed.begin(), keyed.end());

    std::string text;
    int words = 0;
    for (const auto& [key, i] : keyed) {
      std::istringstream in(sentences[i]);
      std::string w;
      while (in >> w && words < params.max_output_tokens) {
        if (!text.empty()) text.push_back(' ');
        text += w;
        ++words;
      }
    }
    return {text, 0};
  }
};

struct HttpBackendConfig {
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model = "default";
  std::string api_key;  // usually from FAITHSUM_API_KEY
  int max_attempts = 3;
  int backoff_initial_ms = 250;
  int timeout_seconds = 60;
};

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

inline ParsedUrl parse_base_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw ConfigError("base URL lacks a scheme: " + std::string(url));
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.scheme_host_port = std::string(url.substr(0, path_start));
  if (path_start != std::string_view::npos) out.path_prefix = std::string(url.substr(path_start));
  while (out.path_prefix.ends_with('/')) out.path_prefix.pop_back();
  return out;
}

// OpenAI-compatible chat-completions client. One request per candidate;
// connection errors, 429 and 5xx are retried with exponential backoff.
class OpenAiHttpBackend final : public GenerationBackend {
 public:
  explicit OpenAiHttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)), url_(parse_base_url(cfg_.base_url)) {
    if (cfg_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  }

  std::string id() const override { return "openai-compatible-http"; }

  nlohmann::json request_body(const Prompt& prompt, const GenerationParams& params) const {
    return {{"model", cfg_.model},
            {"messages",
             nlohmann::json::array({{{"role", "system"}, {"content", prompt.system_text}},
                                    {{"role", "user"}, {"content", prompt.user_text}}})},
            {"temperature", params.temperature},
            {"max_tokens", params.max_output_tokens}};
  }

  Completion complete(const Prompt& prompt, const GenerationParams& params, std::size_t) const override {
    const std::string body = request_body(prompt, params).dump();
    httplib::Client client(url_.scheme_host_port);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    std::string last_error;
    bool unreachable = false;
    int delay_ms = cfg_.backoff_initial_ms;
    for (int attempt = 0; attempt < cfg_.max_attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
        delay_ms *= 2;
      }
      auto res = client.Post(url_.path_prefix + "/chat/completions", headers, body, "application/json");
      if (!res) {
        unreachable = true;
        last_error = "connection failed: " + httplib::to_string(res.error());
        continue;
      }
      unreachable = false;
      if (res->status == 200) {
        try {
          auto j = nlohmann::json::parse(res->body);
          return {j.at("choices").at(0).at("message").at("content").get<std::string>(), attempt};
        } catch (const nlohmann::json::exception& e) {
          throw BackendFailure(std::string("malformed chat-completion response: ") + e.what(), attempt, false);
        }
      }
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
      if (res->status != 429 && res->status < 500) throw BackendFailure(last_error, attempt, false);
    }
    throw BackendFailure(last_error, cfg_.max_attempts - 1, unreachable);
  }

 private:
  HttpBackendConfig cfg_;
  ParsedUrl url_;
};

// ---------------------------------------------------------------------------
// Candidate generation

struct Candidate {
  std::string text;
  std::size_t index = 0;
  GenerationParams params;
  double latency_ms = 0.0;
  int retries = 0;
  bool failed = false;
  std::string error;
};

namespace detail {

inline bool blank(std::string_view s) { return io::trim(s).empty(); }

inline Candidate generate_one(const Prompt& prompt, const GenerationParams& params, const GenerationBackend& backend,
                              std::size_t index, bool& unreachable) {
  Candidate c;
  c.index = index;
  c.params = params;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto out = backend.complete(prompt, params, index);
    c.retries = out.retries;
    if (blank(out.text)) {
      // Empty generations get exactly one more try.
      c.retries += 1;
      out = backend.complete(prompt, params, index);
      c.retries += out.retries;
    }
    if (blank(out.text)) {
      c.failed = true;
      c.error = "empty generation";
    } else {
      c.text = std::string(io::trim(out.text));
    }
  } catch (const BackendFailure& e) {
    c.failed = true;
    c.retries += e.retries();
    c.error = e.what();
    unreachable = unreachable || e.unreachable();
  }
  c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace detail

// Produces exactly n_candidates entries, ordered by index whatever the
// completion order. Failed candidates are kept with failed = true; if all
// of them fail the whole record fails.
inline std::vector<Candidate> generate_candidates(const Prompt& prompt, const GenerationParams& params,
                                                  const GenerationBackend& backend, std::size_t max_parallel = 1) {
  params.validate();
  const auto n = static_cast<std::size_t>(params.n_candidates);
  std::vector<Candidate> out(n);
  std::vector<char> unreachable(n, 0);
  max_parallel = std::max<std::size_t>(1, max_parallel);
  for (std::size_t base = 0; base < n; base += max_parallel) {
    const std::size_t end = std::min(n, base + max_parallel);
    if (end - base == 1) {
      bool u = false;
      out[base] = detail::generate_one(prompt, params, backend, base, u);
      unreachable[base] = u;
      continue;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t i = base; i < end; ++i)
      jobs.push_back(std::async(std::launch::async, [&, i] {
        bool u = false;
        out[i] = detail::generate_one(prompt, params, backend, i, u);
        unreachable[i] = u;
      }));
    for (auto& j : jobs) j.get();
  }
  if (std::all_of(out.begin(), out.end(), [](const Candidate& c) { return c.failed; })) {
    if (std::all_of(unreachable.begin(), unreachable.end(), [](char u) { return u != 0; }))
      throw UnreachableError("generation backend unreachable: " + out.front().error);
    throw GenerationError("all " + std::to_string(n) + " candidates failed; first error: " + out.front().error);
  }
  return out;
}

// Levenshtein distance over code points.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<char32_t> x, y;
  for (auto cp : unicode::CodePoints(a)) x.push_back(cp.value);
  for (auto cp : unicode::CodePoints(b)) y.push_back(cp.value);
  std::vector<std::size_t> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

inline double mean_pairwise_edit_distance(const std::vector<std::string>& texts) {
  if (texts.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < texts.size(); ++i)
    for (std::size_t j = i + 1; j < texts.size(); ++j, ++pairs) total += static_cast<double>(edit_distance(texts[i], texts[j]));
  return total / static_cast<double>(pairs);
}

// ---------------------------------------------------------------------------
// Fine-tuning export

struct FtExample {
  ChqRecord record;
  Prompt prompt;
};

struct ExportResult {
  std::size_t written = 0;
  std::vector<std::string> warnings;
};

inline ExportResult export_ft_pairs(const std::vector<FtExample>& examples, const std::filesystem::path& output_path) {
  ExportResult result;
  std::string out;
  for (const auto& ex : examples) {
    if (!ex.record.reference_summary) {
      result.warnings.push_back("record '" + ex.record.id + "' has no reference summary, skipped");
      continue;
    }
    nlohmann::json j;
    j["id"] = ex.record.id;
    j["language"] = to_string(ex.record.language);
    j["prompt"] = ex.prompt.user_text;
    j["completion"] = *ex.record.reference_summary;
    out += j.dump();
    out += '\n';
    ++result.written;
  }
  io::write_file(output_path, out);
  return result;
}

}  // namespace faithsum
