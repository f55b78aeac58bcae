// Copyright 2026 The lexnmt Authors.
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

#include <span>
#include <string>
#include <vector>

#include "lexnmt/lexicon.hpp"
#include "lexnmt/model.hpp"

namespace lexnmt {

struct BeamOptions {
  int beam = 5;
  // Multiplies the probability of EOS in the search score (applied as log).
  double eos_discount = 0.9;
  // Maximum emitted tokens including EOS; 0 means 2 * |F| + 5.
  int max_len = 0;
};

struct Hypothesis {
  std::vector<int> tokens;  // emitted ids; ends in kEos when the search finished it
  double score = 0.0;       // sum of log p plus log(eos_discount) for EOS
  DecoderState state;
  std::vector<Vec> attention;  // one vector per emitted token
  bool finished = false;
  long created = 0;
};

int default_max_len(std::size_t source_length);

// Hypotheses are ranked by total score, best first. BOS is never proposed.
std::vector<Hypothesis> beam_search(const Model& model, const LexiconMatrix* lexicon,
                                    std::span<const int> source, const BeamOptions& options);

Hypothesis greedy_decode(const Model& model, const LexiconMatrix* lexicon,
                         std::span<const int> source, double eos_discount = 1.0, int max_len = 0);

// Recomputes a token sequence's score with the teacher-forced forward pass.
double score_sequence(const Model& model, const LexiconMatrix* lexicon, std::span<const int> source,
                      std::span<const int> tokens, double eos_discount);

struct Replacement {
  int position = 0;         // index into the output sentence
  int source_position = 0;  // most-attended source word
  std::string source_token;
  std::string replacement;
  bool copied = false;  // source word was copied because the lexicon had no translation
};

struct Translation {
  Sentence tokens;  // surface tokens, EOS removed
  double score = 0.0;
  std::vector<Vec> attention;
  std::vector<Replacement> replacements;
};

// Every emitted unk at step i becomes the best lexicon translation of the
// source word with the highest attention at step i, or a copy of that source
// word when the lexicon does not cover it. With no lexicon, unks are copied.
Translation replace_unknowns(const Hypothesis& hypothesis, std::span<const std::string> source_tokens,
                             const Lexicon* lexicon, const Vocabulary& target_vocab);

}  // namespace lexnmt
