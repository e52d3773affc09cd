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

// Tags entities in one question, ranks its sentences, and prints the
// context that would go into the prompt.

#include <iostream>
#include <string>

#include "faithsum/corpus.hpp"
#include "faithsum/medner.hpp"
#include "faithsum/textrank.hpp"

int main(int argc, char** argv) {
  using namespace faithsum;
  const std::string data = FAITHSUM_DATA_DIR;
  const std::string question = argc > 1 ? argv[1]
                                        : "I take metformin for diabetes. My feet feel numb at night. "
                                          "The weather has been cold. Is the numbness caused by metformin?";

  const auto record = normalize_record(question, std::nullopt, Language::English, "sample");
  const auto lex = load_lexicons(data + "/gazetteer_en.txt", data + "/negation_en.txt", Language::English);
  const auto stopwords = load_word_list(data + "/stopwords_en.txt", Language::English);
  const auto interrogatives = load_word_list(data + "/interrogatives_en.txt", Language::English);

  const auto sentences = segment_sentences(record.question, Language::English);
  std::vector<std::vector<Token>> tokens;
  std::vector<EntityMention> mentions;
  for (const auto& s : sentences) {
    tokens.push_back(tokenize(s.text, Language::English));
    auto m = tag_entities(tokens.back(), lex.gazetteer, lex.negation, kDefaultNegationWindow, s.index);
    mentions.insert(mentions.end(), m.begin(), m.end());
  }
  const auto ranked = rank(build_similarity_graph(tokens, stopwords));
  const auto ctx = select_context(tokens, ranked.scores, mentions, query_terms(sentences, tokens, interrogatives, stopwords),
                                  default_context_budget(sentences.size()));

  for (const auto& m : mentions)
    std::cout << "entity  " << m.canonical_id << (m.negated ? " (negated)" : "") << "  \"" << m.surface << "\"\n";
  for (std::size_t k = 0; k < ctx.selected.size(); ++k) {
    const auto i = ctx.selected[k];
    std::cout << "context [" << to_string(ctx.reasons[k]) << ", " << ranked.scores[i] << "] " << sentences[i].text << "\n";
  }
}
