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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lexnmt/corpus.hpp"
#include "lexnmt/lstm.hpp"

namespace lexnmt {

// Sufficient statistics of BLEU-4 for one sentence or a whole corpus.
struct BleuStats {
  std::array<long, 4> matches{};
  std::array<long, 4> totals{};
  long hyp_len = 0;
  long ref_len = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(const Sentence& hypothesis, const Sentence& reference);
// 0..100. Strict geometric mean unless `smooth` (add-one on orders 2..4).
double bleu_from_stats(const BleuStats& stats, bool smooth = false);

struct BleuResult {
  double score = 0.0;
  std::array<double, 4> precisions{};
  double brevity_penalty = 1.0;
  long hyp_len = 0;
  long ref_len = 0;
};

BleuResult bleu4(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
                 bool smooth = false);

struct NistResult {
  double score = 0.0;
  std::array<double, 5> per_order{};
  double brevity_factor = 1.0;
};

// Information weights are estimated from the reference corpus.
NistResult nist(std::span<const Sentence> hypotheses, std::span<const Sentence> references);

enum class RareWordScope {
  either,         // rare in the training targets or in the references
  training_only,  // rare in the training targets
};

struct RecallResult {
  double recall = 100.0;  // percentage; 100 when there is nothing rare to recover
  long recovered = 0;
  long total = 0;
};

RecallResult rare_word_recall(std::span<const Sentence> hypotheses,
                              std::span<const Sentence> references,
                              std::span<const Sentence> training_targets, int threshold = 8,
                              RareWordScope scope = RareWordScope::either);

struct BootstrapResult {
  int iterations = 0;
  long wins_a = 0;
  long wins_b = 0;
  long ties = 0;
  double bleu_a = 0.0;
  double bleu_b = 0.0;
  // One-sided: probability that the system is *not* better than the other.
  double p_a_better = 1.0;
  double p_b_better = 1.0;

  bool a_better_at(double level) const { return p_a_better < level; }
  bool b_better_at(double level) const { return p_b_better < level; }
};

// Paired bootstrap over corpus BLEU. Resample r draws its indices from a
// generator seeded with (seed, r).
BootstrapResult paired_bootstrap(std::span<const Sentence> system_a,
                                 std::span<const Sentence> system_b,
                                 std::span<const Sentence> references, int iterations,
                                 std::uint64_t seed);

// Mean Shannon entropy in bits over all attention vectors.
double attention_entropy(std::span<const Vec> attention);

}  // namespace lexnmt
