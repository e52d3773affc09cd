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


#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

// Eigen must precede <resolv.h>, which httplib pulls in and which defines _res.
#include "oracles.hpp"

#include "faithsum/faithful.hpp"
#include "fake_server.hpp"
#include "test_support.hpp"

namespace faithsum {
namespace {

// Returns scripted scores and remembers every pair it was asked about.
class RecordingScorer final : public ScorerClient {
 public:
  std::function<NliScores(const SentencePair&)> fn = [](const SentencePair&) { return NliScores{0.5, 0.2, 0.3}; };
  std::string id = "recording";
  mutable std::vector<SentencePair> seen;
  mutable std::atomic<int> nli_calls{0};
  mutable std::atomic<int> bert_calls{0};
  mutable std::mutex mu;

  std::string model_id() const override { return id; }
  std::vector<NliScores> nli(std::span<const SentencePair> pairs) const override {
    ++nli_calls;
    std::vector<NliScores> out;
    std::lock_guard lock(mu);
    for (const auto& p : pairs) {
      seen.push_back(p);
      out.push_back(fn(p));
    }
    return out;
  }
  BertScore bertscore(const std::string&, const std::string&, Language) const override {
    ++bert_calls;
    return {0.6, 0.7, 0.65, id};
  }
};

NliMatrix matrix_from(const std::vector<std::vector<double>>& entail, const std::vector<std::vector<double>>& contradict) {
  NliMatrix m{entail.size(), entail[0].size(), {}};
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c)
      m.cells.push_back({entail[r][c], contradict[r][c], 1.0 - entail[r][c] - contradict[r][c]});
  return m;
}

// Random simplex rows: entail + contradict <= 1.
void random_cells(std::mt19937_64& rng, std::size_t rows, std::size_t cols, std::vector<std::vector<double>>& e,
                  std::vector<std::vector<double>>& c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  e.assign(rows, std::vector<double>(cols));
  c.assign(rows, std::vector<double>(cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = 0; k < cols; ++k) {
      double a = u(rng), b = u(rng);
      if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
      }
      e[r][k] = a;
      c[r][k] = b;
    }
}

// ---------------------------------------------------------------------------
// NLI matrix and SummaC

TEST(NliMatrix, PairsAreRowMajorSummaryBySource) {
  RecordingScorer s;
  auto m = nli_matrix({"s1", "s2", "s3"}, {"h1", "h2"}, s);
  EXPECT_EQ(m.rows, 2u);
  EXPECT_EQ(m.cols, 3u);
  ASSERT_EQ(s.seen.size(), 6u);
  const std::vector<SentencePair> expected = {{"s1", "h1"}, {"s2", "h1"}, {"s3", "h1"},
                                              {"s1", "h2"}, {"s2", "h2"}, {"s3", "h2"}};
  EXPECT_EQ(s.seen, expected);
  EXPECT_EQ(s.nli_calls.load(), 1);
}

TEST(NliMatrix, RejectsBadScores) {
  RecordingScorer s;
  s.fn = [](const SentencePair&) { return NliScores{0.5, 0.2, 0.1}; };
  EXPECT_THROW(nli_matrix({"a"}, {"b"}, s), ProtocolError);
  EXPECT_THROW(nli_matrix({}, {"b"}, s), ConfigError);
  EXPECT_THROW(validate_nli_scores({-0.1, 0.6, 0.5}), ProtocolError);
  EXPECT_THROW(validate_nli_scores({NAN, 0.5, 0.5}), ProtocolError);
  EXPECT_NO_THROW(validate_nli_scores({0.5, 0.25, 0.25 + 5e-5}));
}

TEST(Summac, WorkedExample) {
  // Row 0: max(0.9-0.05, 0.1-0.8) = 0.85; row 1: max(0.2-0.7, 0.3-0.3) = 0.
  auto m = matrix_from({{0.9, 0.1}, {0.2, 0.3}}, {{0.05, 0.8}, {0.7, 0.3}});
  EXPECT_NEAR(summac_zs(m), 0.425, 1e-12);
  EXPECT_THROW(summac_zs(NliMatrix{}), ConfigError);
}

TEST(Summac, MatchesMaxMeanOracleOnRandomMatrices) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<double>> e, c;
    random_cells(rng, 1 + rng() % 6, 1 + rng() % 8, e, c);
    EXPECT_NEAR(summac_zs(matrix_from(e, c)), oracle::summac_max_mean(e, c), 1e-9);
  }
}

TEST(Summac, MonotoneInEntailCells) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::vector<double>> e, c;
    random_cells(rng, 1 + rng() % 5, 1 + rng() % 5, e, c);
    const double before = summac_zs(matrix_from(e, c));
    const std::size_t r = rng() % e.size(), k = rng() % e[0].size();
    e[r][k] += u(rng) * (1.0 - e[r][k] - c[r][k]);  // mass moved from neutral
    EXPECT_GE(summac_zs(matrix_from(e, c)), before - 1e-15);
  }
}

TEST(Summac, InvariantUnderRowAndColumnPermutation) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> e, c;
    random_cells(rng, 4, 5, e, c);
    const double base = summac_zs(matrix_from(e, c));
    std::vector<std::size_t> rp{0, 1, 2, 3}, cp{0, 1, 2, 3, 4};
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    std::vector<std::vector<double>> e2(4, std::vector<double>(5)), c2 = e2;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        e2[i][j] = e[rp[i]][cp[j]];
        c2[i][j] = c[rp[i]][cp[j]];
      }
    EXPECT_NEAR(summac_zs(matrix_from(e2, c2)), base, 1e-12);
  }
}

TEST(Align, ChunksConsecutiveSentences) {
  const std::vector<std::string> s = {"a.", "b.", "c.", "d.", "e."};
  EXPECT_EQ(chunk_sentences(s, 2), (std::vector<std::string>{"a. b.", "c. d.", "e."}));
  EXPECT_EQ(chunk_sentences(s, 9), (std::vector<std::string>{"a. b. c. d. e."}));
  EXPECT_EQ(chunk_sentences(s, 1), s);
  EXPECT_THROW(chunk_sentences(s, 0), ConfigError);
}

TEST(Align, SingleChunkEqualsEntailmentAgainstWholeSource) {
  LexicalStubScorer stub;
  const std::vector<std::string> src = {"I have a fever.", "I took aspirin.", "My head hurts."};
  const std::vector<std::string> sum = {"Fever after aspirin.", "Head hurts."};
  const double a = align_zs(src, sum, stub, 3);
  auto whole = stub.nli(std::vector<SentencePair>{{"I have a fever. I took aspirin. My head hurts.", sum[0]},
                                                 {"I have a fever. I took aspirin. My head hurts.", sum[1]}});
  EXPECT_NEAR(a, (whole[0].entail + whole[1].entail) / 2.0, 1e-12);
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, 1.0);
}

TEST(Align, UsesBestChunkPerSummarySentence) {
  RecordingScorer s;
  s.fn = [](const SentencePair& p) {
    const bool hit = p.premise.find("x") != std::string::npos;
    return hit ? NliScores{0.9, 0.0, 0.1} : NliScores{0.2, 0.1, 0.7};
  };
  EXPECT_NEAR(align_zs({"a.", "b.", "x.", "d."}, {"h."}, s, 2), 0.9, 1e-12);
  EXPECT_EQ(s.seen.size(), 2u);
}

// ---------------------------------------------------------------------------
// Stub scorer

TEST(Stub, FormulaCases) {
  LexicalStubScorer stub;
  auto r = stub.nli(std::vector<SentencePair>{{"I have a fever.", "I have a fever."},
                                              {"I have a fever.", "I have no fever."},
                                              {"I have a fever.", "Cats purr loudly."},
                                              {"আমার জ্বর আছে।", "আমার জ্বর নেই।"}});
  EXPECT_NEAR(r[0].entail, 0.95, 1e-12);
  EXPECT_NEAR(r[0].contradict, 0.05, 1e-12);
  EXPECT_NEAR(r[1].entail, 0.05, 1e-12);
  EXPECT_NEAR(r[1].contradict, 0.9, 1e-12);
  EXPECT_NEAR(r[2].entail, 0.05, 1e-12);
  EXPECT_NEAR(r[3].entail, 0.05, 1e-12);
  EXPECT_GT(r[3].contradict, 0.5);
  for (const auto& s : r) EXPECT_NO_THROW(validate_nli_scores(s));
  EXPECT_DOUBLE_EQ(stub.bertscore("a b", "a b", Language::English).f1, 1.0);
}

// ---------------------------------------------------------------------------
// HTTP sidecar client

struct FakeSidecar {
  testing::FakeServer fake;
  std::function<nlohmann::json(const nlohmann::json&)> nli = [](const nlohmann::json& req) {
    nlohmann::json scores = nlohmann::json::array();
    for (std::size_t i = 0; i < req["pairs"].size(); ++i)
      scores.push_back({{"entail", 0.7}, {"contradict", 0.1}, {"neutral", 0.2}});
    return nlohmann::json{{"scores", scores}};
  };
  nlohmann::json bert = {{"precision", 0.7}, {"recall", 0.76}, {"f1", 0.73}, {"model_id", "bert-x"}};
  int nli_status = 200;
  std::atomic<int> nli_requests{0};

  FakeSidecar() {
    auto& s = fake.server();
    s.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok","ready":true,"models":["nli-a","bert-x"]})", "application/json");
    });
    s.Post("/v1/nli", [this](const httplib::Request& req, httplib::Response& res) {
      ++nli_requests;
      res.status = nli_status;
      if (nli_status == 200) res.set_content(nli(nlohmann::json::parse(req.body)).dump(), "application/json");
      else res.set_content("overloaded", "text/plain");
    });
    s.Post("/v1/bertscore", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(bert.dump(), "application/json");
    });
    fake.start();
  }
};

TEST(HttpScorer, HealthAndModelId) {
  FakeSidecar side;
  HttpScorerClient client(side.fake.url());
  auto h = client.health();
  EXPECT_TRUE(h.ready);
  EXPECT_EQ(h.status, "ok");
  EXPECT_EQ(client.model_id(), "nli-a+bert-x");
}

TEST(HttpScorer, MatrixOfSixPairs) {
  FakeSidecar side;
  std::vector<nlohmann::json> seen;
  side.nli = [&](const nlohmann::json& req) {
    seen.push_back(req);
    nlohmann::json scores = nlohmann::json::array();
    for (std::size_t i = 0; i < req["pairs"].size(); ++i)
      scores.push_back({{"entail", 0.1 * static_cast<double>(i)}, {"contradict", 0.0}, {"neutral", 1.0 - 0.1 * static_cast<double>(i)}});
    return nlohmann::json{{"scores", scores}};
  };
  HttpScorerClient client(side.fake.url());
  auto m = nli_matrix({"s1", "s2", "s3"}, {"h1", "h2"}, client);
  ASSERT_EQ(seen.size(), 1u);
  ASSERT_EQ(seen[0]["pairs"].size(), 6u);
  EXPECT_EQ(seen[0]["pairs"][1]["premise"], "s2");
  EXPECT_EQ(seen[0]["pairs"][1]["hypothesis"], "h1");
  EXPECT_EQ(seen[0]["pairs"][3]["hypothesis"], "h2");
  EXPECT_NEAR(m.at(1, 2).entail, 0.5, 1e-12);
}

TEST(HttpScorer, LargeRequestsAreBatched) {
  FakeSidecar side;
  HttpScorerClient client(side.fake.url());
  std::vector<SentencePair> pairs(HttpScorerClient::kMaxPairsPerRequest + 10, {"p", "h"});
  EXPECT_EQ(client.nli(pairs).size(), pairs.size());
  EXPECT_EQ(side.nli_requests.load(), 2);
}

TEST(HttpScorer, RejectsTriplesOffTheSimplex) {
  FakeSidecar side;
  side.nli = [](const nlohmann::json&) {
    return nlohmann::json{{"scores", {{{"entail", 0.5}, {"contradict", 0.2}, {"neutral", 0.1}}}}};
  };
  HttpScorerClient client(side.fake.url());
  EXPECT_THROW(client.nli(std::vector<SentencePair>{{"p", "h"}}), ProtocolError);
}

TEST(HttpScorer, RejectsLengthMismatchAndMalformedBodies) {
  FakeSidecar side;
  side.nli = [](const nlohmann::json&) { return nlohmann::json{{"scores", nlohmann::json::array()}}; };
  HttpScorerClient client(side.fake.url());
  EXPECT_THROW(client.nli(std::vector<SentencePair>{{"p", "h"}}), ProtocolError);
  side.nli = [](const nlohmann::json&) { return nlohmann::json{{"scores", {{{"entail", 1.0}}}}}; };
  EXPECT_THROW(client.nli(std::vector<SentencePair>{{"p", "h"}}), ProtocolError);
  side.nli = [](const nlohmann::json&) { return nlohmann::json{{"other", 1}}; };
  EXPECT_THROW(client.nli(std::vector<SentencePair>{{"p", "h"}}), ProtocolError);
}

TEST(HttpScorer, ServiceErrorCarriesStatus) {
  FakeSidecar side;
  side.nli_status = 503;
  HttpScorerClient client(side.fake.url());
  try {
    client.nli(std::vector<SentencePair>{{"p", "h"}});
    FAIL() << "expected ServiceError";
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 503);
    EXPECT_NE(std::string(e.what()).find("overloaded"), std::string::npos);
  }
}

TEST(HttpScorer, BertscoreRangeChecked) {
  FakeSidecar side;
  HttpScorerClient client(side.fake.url());
  EXPECT_DOUBLE_EQ(bert_f1("a", "b", Language::English, client), 0.73);
  side.bert["f1"] = 1.2;
  EXPECT_THROW(bert_f1("a", "b", Language::English, client), ProtocolError);
}

TEST(HttpScorer, Unreachable) {
  HttpScorerClient client("http://127.0.0.1:" + std::to_string(testing::closed_port()), 2);
  EXPECT_THROW(client.health(), UnreachableError);
  EXPECT_THROW(client.nli(std::vector<SentencePair>{{"p", "h"}}), UnreachableError);
}

// ---------------------------------------------------------------------------
// Cache

TEST(Cache, SecondLookupHitsDisk) {
  auto dir = testing::scratch_dir("cache-hit");
  RecordingScorer inner;
  inner.fn = [](const SentencePair& p) { return NliScores{0.25 + 0.01 * static_cast<double>(p.premise.size()), 0.5, 0.25 - 0.01 * static_cast<double>(p.premise.size())}; };
  CachingScorer cache(inner, dir);
  std::vector<SentencePair> pairs = {{"a", "h"}, {"bb", "h"}};
  auto first = cache.nli(pairs);
  pairs.push_back({"ccc", "h"});
  auto second = cache.nli(pairs);
  EXPECT_EQ(inner.seen.size(), 3u);  // only the new pair reached the scorer
  for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].entail, second[i].entail);
  EXPECT_EQ(cache.bertscore("x", "y", Language::English).f1, 0.65);
  EXPECT_EQ(cache.bertscore("x", "y", Language::English).f1, 0.65);
  EXPECT_EQ(inner.bert_calls.load(), 1);
  EXPECT_EQ(cache.bertscore("x", "y", Language::Bangla).f1, 0.65);
  EXPECT_EQ(inner.bert_calls.load(), 2);
}

TEST(Cache, KeyedByModelId) {
  auto dir = testing::scratch_dir("cache-model");
  RecordingScorer a, b;
  b.id = "other";
  std::vector<SentencePair> pairs = {{"p", "h"}};
  CachingScorer(a, dir).nli(pairs);
  CachingScorer(b, dir).nli(pairs);
  EXPECT_EQ(a.seen.size(), 1u);
  EXPECT_EQ(b.seen.size(), 1u);
}

TEST(Cache, CorruptEntryIsRecomputed) {
  auto dir = testing::scratch_dir("cache-corrupt");
  RecordingScorer inner;
  CachingScorer cache(inner, dir);
  std::vector<SentencePair> pairs = {{"p", "h"}};
  cache.nli(pairs);
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file()) io::write_file(e.path(), "{trunc");
  EXPECT_NEAR(cache.nli(pairs)[0].entail, 0.5, 1e-12);
  EXPECT_EQ(inner.seen.size(), 2u);
}

TEST(Cache, ConcurrentWritersLeaveNoPartialFiles) {
  auto dir = testing::scratch_dir("cache-concurrent");
  LexicalStubScorer stub;
  CachingScorer cache(stub, dir);
  std::vector<SentencePair> pairs;
  for (int i = 0; i < 40; ++i) pairs.push_back({"premise " + std::to_string(i), "hypothesis " + std::to_string(i % 7)});
  const auto expected = stub.nli(pairs);
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      auto got = cache.nli(pairs);
      for (std::size_t i = 0; i < got.size(); ++i)
        if (got[i].entail != expected[i].entail) ++mismatches;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(mismatches.load(), 0);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    ++files;
    EXPECT_EQ(e.path().extension(), ".json");
    EXPECT_NO_THROW(nlohmann::json::parse(io::read_file(e.path())));
  }
  EXPECT_EQ(files, pairs.size());
}

// ---------------------------------------------------------------------------
// Entity retention and score reports

struct EnglishNer {
  Lexicons lex = load_lexicons(testing::data_dir() / "gazetteer_en.txt", testing::data_dir() / "negation_en.txt",
                               Language::English);
  NerResources res{&lex.gazetteer, &lex.negation};
};

ChqRecord make_record(std::string q, std::optional<std::string> ref = {}, Language lang = Language::English) {
  ChqRecord r;
  r.id = "t";
  r.question = std::move(q);
  r.reference_summary = std::move(ref);
  r.language = lang;
  return r;
}

TEST(Retention, Cases) {
  EnglishNer ner;
  auto rec = make_record("I take aspirin every day. I have no fever.");
  auto half = entity_retention(rec, "Can I keep taking aspirin?", ner.res);
  EXPECT_DOUBLE_EQ(half.retention, 0.5);
  EXPECT_TRUE(half.negation_consistent);

  auto all = entity_retention(rec, "With no fever, is daily aspirin fine?", ner.res);
  EXPECT_DOUBLE_EQ(all.retention, 1.0);
  EXPECT_TRUE(all.negation_consistent);

  auto flipped = entity_retention(rec, "I take aspirin and have a fever.", ner.res);
  EXPECT_DOUBLE_EQ(flipped.retention, 0.5);
  EXPECT_FALSE(flipped.negation_consistent);
  EXPECT_TRUE(has_negation_flip(flipped.overlap));

  auto invented = entity_retention(rec, "Can I take ibuprofen and aspirin without a fever?", ner.res);
  EXPECT_FALSE(invented.negation_consistent);
  EXPECT_EQ(invented.overlap.hallucinated.size(), 1u);

  auto none = entity_retention(make_record("What should I do?"), "Anything.", ner.res);
  EXPECT_DOUBLE_EQ(none.retention, 1.0);
}

TEST(Report, FieldsFollowReferenceAndLanguage) {
  EnglishNer ner;
  LexicalStubScorer stub;
  ScoringOptions opt{&stub, ner.res};
  auto with_ref = score_summary(make_record("Is aspirin safe? I have a fever.", "Is aspirin safe with fever?"),
                                "Is aspirin safe with a fever?", opt);
  EXPECT_TRUE(with_ref.r1 && with_ref.r2 && with_ref.rl && with_ref.bert_f1 && with_ref.fre);
  auto no_ref = score_summary(make_record("Is aspirin safe? I have a fever."), "Is aspirin safe with a fever?", opt);
  EXPECT_FALSE(no_ref.r1 || no_ref.bert_f1);
  EXPECT_DOUBLE_EQ(no_ref.summac_zs, with_ref.summac_zs);
  opt.enable_bert = false;
  EXPECT_FALSE(score_summary(make_record("Is aspirin safe?", "Safe?"), "Is aspirin safe?", opt).bert_f1);

  auto j = to_json(with_ref);
  EXPECT_DOUBLE_EQ(j["align_x100"].get<double>(), 100.0 * j["align"].get<double>());
  EXPECT_TRUE(to_json(no_ref)["r1"].is_null());

  Lexicons bn = load_lexicons(testing::data_dir() / "gazetteer_bn.txt", testing::data_dir() / "negation_bn.txt",
                              Language::Bangla);
  ScoringOptions bopt{&stub, {&bn.gazetteer, &bn.negation}};
  auto b = score_summary(make_record("আমার জ্বর। কী করব?", "জ্বর হলে কী করব?", Language::Bangla), "জ্বর হলে কী করব?", bopt);
  EXPECT_FALSE(b.fre);
  EXPECT_TRUE(b.r1);
  EXPECT_THROW(score_summary(make_record("x"), "y", ScoringOptions{}), ConfigError);
}

// ---------------------------------------------------------------------------
// Selection

ScoredCandidate scored(double summac, double r1_source, double retention = 1.0, bool consistent = true, bool failed = false) {
  ScoredCandidate c;
  c.report.summac_zs = summac;
  c.report.entity_retention = retention;
  c.report.negation_consistent = consistent;
  c.report.r1 = PrfScore::from(r1_source / 2, r1_source / 2);
  c.r1_vs_source = r1_source;
  c.candidate.failed = failed;
  return c;
}

TEST(Select, Examples) {
  std::vector<ScoredCandidate> c = {scored(0.2, 0.9), scored(0.7, 0.1), scored(0.7, 0.5)};
  EXPECT_EQ(select_best(c, SelectorSpec::summac()), 1u);  // tie goes to the lower index
  EXPECT_EQ(select_best(c, SelectorSpec::rouge1()), 0u);
  EXPECT_EQ(select_best(c, SelectorSpec::rouge1(Rouge1Target::Reference)), 0u);
  c[0].candidate.failed = true;
  EXPECT_EQ(select_best(c, SelectorSpec::rouge1()), 2u);
  for (auto& x : c) x.candidate.failed = true;
  EXPECT_THROW(select_best(c, SelectorSpec::summac()), GenerationError);
  EXPECT_THROW(select_best(std::vector<ScoredCandidate>{}, SelectorSpec::summac()), ConfigError);
  EXPECT_THROW(select_best(c, SelectorSpec{SelectorKind::Summac, Rouge1Target::Source}), ConfigError);
}

TEST(Select, EntityKeyIsLexicographic) {
  std::vector<ScoredCandidate> c = {scored(0.9, 0, 1.0, false), scored(0.1, 0, 0.5, true), scored(0.5, 0, 0.5, true),
                                    scored(0.2, 0, 1.0, true)};
  EXPECT_EQ(select_best(c, SelectorSpec::entity()), 3u);
  c[3].report.negation_consistent = false;
  EXPECT_EQ(select_best(c, SelectorSpec::entity()), 2u);
}

TEST(Select, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ScoredCandidate> c;
    std::vector<double> keys;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 6); i < n; ++i) {
      double k = std::round(u(rng) * 4) / 4;  // coarse grid so ties occur
      keys.push_back(k);
      c.push_back(scored(k, 0));
    }
    const auto base = select_best(c, SelectorSpec::summac());
    EXPECT_EQ(base, oracle::first_argmax(keys));
    auto scaled = c;
    for (auto& x : scaled) x.report.summac_zs = 3.0 * x.report.summac_zs + 2.0;
    EXPECT_EQ(select_best(scaled, SelectorSpec::summac()), base);
    auto warped = c;
    for (auto& x : warped) x.report.summac_zs = std::exp(x.report.summac_zs);
    EXPECT_EQ(select_best(warped, SelectorSpec::summac()), base);
  }
}

TEST(Select, ParseSelector) {
  EXPECT_EQ(selector_name(parse_selector("rouge1")), "rouge1-source");
  EXPECT_EQ(selector_name(parse_selector("r1", "reference")), "rouge1-reference");
  EXPECT_EQ(selector_name(parse_selector("summac")), "summac");
  EXPECT_EQ(selector_name(parse_selector("entity")), "entity");
  EXPECT_THROW(parse_selector("bleu"), ConfigError);
  EXPECT_THROW(parse_selector("rouge1", "elsewhere"), ConfigError);
}

}  // namespace
}  // namespace faithsum
