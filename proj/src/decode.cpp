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


#include "lexnmt/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lexnmt/io.hpp"

namespace lexnmt {

int default_max_len(std::size_t source_length) { return 2 * static_cast<int>(source_length) + 5; }

namespace {

double step_score(const StepOutput& out, int token, Mode mode, double log_discount) {
  double s = token_log_prob(out.distribution, token, mode);
  if (token == kEos) s += log_discount;
  return s;
}

void check_options(std::span<const int> source, double eos_discount) {
  if (source.empty()) throw Error("cannot decode an empty source sentence");
  if (!(eos_discount > 0.0 && eos_discount <= 1.0))
    throw Error("eos discount must be in (0, 1]");
}

}  // namespace

std::vector<Hypothesis> beam_search(const Model& model, const LexiconMatrix* lexicon,
                                    std::span<const int> source, const BeamOptions& options) {
  check_options(source, options.eos_discount);
  if (options.beam < 1) throw Error("beam size must be >= 1");
  const int max_len = options.max_len > 0 ? options.max_len : default_max_len(source.size());
  const double log_discount = std::log(options.eos_discount);
  const auto encoded = model.encode(source);
  const int V = model.config().target_vocab;

  long created = 0;
  std::vector<Hypothesis> active(1);
  active[0].state = model.step_decoder(kBos, model.initial_state());
  active[0].created = created++;
  std::vector<Hypothesis> finished;

  struct Candidate {
    double score;
    int token;
    std::size_t parent;
  };
  std::vector<StepOutput> outputs;
  std::vector<Candidate> candidates;
  for (int length = 1; length <= max_len && !active.empty(); ++length) {
    outputs.clear();
    candidates.clear();
    for (std::size_t h = 0; h < active.size(); ++h) {
      outputs.push_back(model.step(encoded, lexicon, active[h].state));
      for (int k = 0; k < V; ++k) {
        if (k == kBos) continue;
        candidates.push_back(
            {active[h].score + step_score(outputs.back(), k, model.mode(), log_discount), k, h});
      }
    }
    const auto keep = std::min(candidates.size(), static_cast<std::size_t>(options.beam));
    // Ties: score, then token, then parent (active is in creation order).
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        if (a.token != b.token) return a.token < b.token;
                        return a.parent < b.parent;
                      });
    std::vector<Hypothesis> next;
    for (std::size_t c = 0; c < keep; ++c) {
      const auto& cand = candidates[c];
      const auto& parent = active[cand.parent];
      Hypothesis hyp;
      hyp.tokens = parent.tokens;
      hyp.tokens.push_back(cand.token);
      hyp.attention = parent.attention;
      hyp.attention.push_back(outputs[cand.parent].attention);
      hyp.score = cand.score;
      hyp.created = created++;
      if (cand.token == kEos || length == max_len) {
        hyp.finished = true;
        finished.push_back(std::move(hyp));
      } else {
        hyp.state = model.step_decoder(cand.token, parent.state);
        next.push_back(std::move(hyp));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Hypothesis& a, const Hypothesis& b) { return a.created < b.created; });
    active = std::move(next);

    // Early stop once a finished hypothesis beats every active one.
    if (!finished.empty() && !active.empty()) {
      double best_finished = -std::numeric_limits<double>::infinity();
      for (const auto& f : finished) best_finished = std::max(best_finished, f.score);
      double best_active = -std::numeric_limits<double>::infinity();
      for (const auto& a : active) best_active = std::max(best_active, a.score);
      if (best_finished >= best_active) active.clear();
    }
  }
  std::stable_sort(finished.begin(), finished.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.created < b.created;
  });
  return finished;
}

Hypothesis greedy_decode(const Model& model, const LexiconMatrix* lexicon,
                         std::span<const int> source, double eos_discount, int max_len) {
  check_options(source, eos_discount);
  if (max_len <= 0) max_len = default_max_len(source.size());
  const double log_discount = std::log(eos_discount);
  const auto encoded = model.encode(source);
  Hypothesis hyp;
  hyp.state = model.step_decoder(kBos, model.initial_state());
  for (int length = 1; length <= max_len; ++length) {
    const auto out = model.step(encoded, lexicon, hyp.state);
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < model.config().target_vocab; ++k) {
      if (k == kBos) continue;
      const double s = step_score(out, k, model.mode(), log_discount);
      if (best < 0 || s > best_score) {
        best = k;
        best_score = s;
      }
    }
    hyp.tokens.push_back(best);
    hyp.attention.push_back(out.attention);
    hyp.score += best_score;
    if (best == kEos || length == max_len) {
      hyp.finished = true;
      break;
    }
    hyp.state = model.step_decoder(best, hyp.state);
  }
  return hyp;
}

double score_sequence(const Model& model, const LexiconMatrix* lexicon, std::span<const int> source,
                      std::span<const int> tokens, double eos_discount) {
  const double nll = accumulate_sentence_loss(model, lexicon, source, tokens, {}, nullptr);
  const auto eos = std::count(tokens.begin(), tokens.end(), kEos);
  return -nll + static_cast<double>(eos) * std::log(eos_discount);
}

Translation replace_unknowns(const Hypothesis& hypothesis, std::span<const std::string> source_tokens,
                             const Lexicon* lexicon, const Vocabulary& target_vocab) {
  if (hypothesis.attention.size() != hypothesis.tokens.size())
    throw Error("replace_unknowns: hypothesis has no attention trace");
  Translation out;
  out.score = hypothesis.score;
  out.attention = hypothesis.attention;
  for (std::size_t i = 0; i < hypothesis.tokens.size(); ++i) {
    const int id = hypothesis.tokens[i];
    if (id == kEos) break;
    if (id != kUnk) {
      out.tokens.push_back(target_vocab.token(id));
      continue;
    }
    const auto& a = hypothesis.attention[i];
    if (a.size() != static_cast<Eigen::Index>(source_tokens.size()))
      throw Error("replace_unknowns: attention length does not match the source sentence");
    Eigen::Index j = 0;
    for (Eigen::Index k = 1; k < a.size(); ++k)
      if (a(k) > a(j)) j = k;
    Replacement r;
    r.position = static_cast<int>(out.tokens.size());
    r.source_position = static_cast<int>(j);
    r.source_token = source_tokens[static_cast<std::size_t>(j)];
    int best = -1;
    if (lexicon && lexicon->source_vocab().contains(r.source_token))
      best = lexicon->best_target(lexicon->source_vocab().id(r.source_token));
    if (best >= 0) {
      r.replacement = lexicon->target_vocab().token(best);
    } else {
      r.replacement = r.source_token;
      r.copied = true;
    }
    out.tokens.push_back(r.replacement);
    out.replacements.push_back(std::move(r));
  }
  return out;
}

}  // namespace lexnmt
