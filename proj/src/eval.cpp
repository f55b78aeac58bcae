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


#include "lexnmt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include "lexnmt/io.hpp"

namespace lexnmt {

namespace {

using NgramCounts = std::map<std::vector<std::string>, long>;

NgramCounts ngrams(const Sentence& s, int n) {
  NgramCounts out;
  if (static_cast<int>(s.size()) < n) return out;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= s.size(); ++i)
    ++out[std::vector<std::string>(s.begin() + static_cast<long>(i),
                                   s.begin() + static_cast<long>(i) + n)];
  return out;
}

void check_sizes(std::span<const Sentence> hyps, std::span<const Sentence> refs, const char* metric) {
  if (hyps.empty()) throw Error(std::string(metric) + ": empty hypothesis corpus");
  if (hyps.size() != refs.size())
    throw Error(std::string(metric) + ": " + std::to_string(hyps.size()) + " hypotheses vs " +
                std::to_string(refs.size()) + " references");
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < 4; ++n) {
    matches[n] += o.matches[n];
    totals[n] += o.totals[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

BleuStats bleu_stats(const Sentence& hypothesis, const Sentence& reference) {
  BleuStats s;
  s.hyp_len = static_cast<long>(hypothesis.size());
  s.ref_len = static_cast<long>(reference.size());
  for (int n = 1; n <= 4; ++n) {
    const auto h = ngrams(hypothesis, n);
    const auto r = ngrams(reference, n);
    for (const auto& [g, c] : h) {
      s.totals[n - 1] += c;
      auto it = r.find(g);
      if (it != r.end()) s.matches[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

double bleu_from_stats(const BleuStats& s, bool smooth) {
  if (s.hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < 4; ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (smooth && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m <= 0.0 || t <= 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  const double ratio = static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len);
  const double log_bp = std::min(0.0, 1.0 - ratio);
  return 100.0 * std::exp(log_sum / 4.0 + log_bp);
}

BleuResult bleu4(std::span<const Sentence> hypotheses, std::span<const Sentence> references,
                 bool smooth) {
  check_sizes(hypotheses, references, "bleu");
  BleuStats total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i)
    total += bleu_stats(hypotheses[i], references[i]);
  BleuResult r;
  r.score = bleu_from_stats(total, smooth);
  for (int n = 0; n < 4; ++n)
    r.precisions[n] = total.totals[n] ? static_cast<double>(total.matches[n]) /
                                            static_cast<double>(total.totals[n])
                                      : 0.0;
  r.hyp_len = total.hyp_len;
  r.ref_len = total.ref_len;
  r.brevity_penalty =
      total.hyp_len ? std::exp(std::min(0.0, 1.0 - static_cast<double>(total.ref_len) /
                                                    static_cast<double>(total.hyp_len)))
                    : 0.0;
  return r;
}

NistResult nist(std::span<const Sentence> hypotheses, std::span<const Sentence> references) {
  check_sizes(hypotheses, references, "nist");
  constexpr int kOrder = 5;

  // Reference-corpus n-gram counts for n = 1..5; the empty prefix counts
  // every reference word.
  std::map<std::vector<std::string>, long> ref_counts;
  long ref_words = 0;
  for (const auto& ref : references) {
    ref_words += static_cast<long>(ref.size());
    for (int n = 1; n <= kOrder; ++n)
      for (const auto& [g, c] : ngrams(ref, n)) ref_counts[g] += c;
  }
  auto info = [&](const std::vector<std::string>& g) {
    const long count = ref_counts.at(g);
    long prefix = ref_words;
    if (g.size() > 1) prefix = ref_counts.at(std::vector<std::string>(g.begin(), g.end() - 1));
    return std::log2(static_cast<double>(prefix) / static_cast<double>(count));
  };

  NistResult r;
  long hyp_words = 0;
  std::array<double, kOrder> info_sum{};
  std::array<long, kOrder> hyp_total{};
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    hyp_words += static_cast<long>(hypotheses[i].size());
    for (int n = 1; n <= kOrder; ++n) {
      const auto h = ngrams(hypotheses[i], n);
      const auto ref = ngrams(references[i], n);
      for (const auto& [g, c] : h) {
        hyp_total[n - 1] += c;
        auto it = ref.find(g);
        if (it != ref.end()) info_sum[n - 1] += static_cast<double>(std::min(c, it->second)) * info(g);
      }
    }
  }
  double score = 0.0;
  for (int n = 0; n < kOrder; ++n) {
    r.per_order[n] = hyp_total[n] ? info_sum[n] / static_cast<double>(hyp_total[n]) : 0.0;
    score += r.per_order[n];
  }
  // beta makes the factor 0.5 at a length ratio of 2/3.
  const double beta = std::log(0.5) / std::pow(std::log(2.0 / 3.0), 2);
  const double ratio =
      ref_words ? std::min(1.0, static_cast<double>(hyp_words) / static_cast<double>(ref_words)) : 1.0;
  r.brevity_factor = ratio > 0.0 ? std::exp(beta * std::pow(std::log(ratio), 2)) : 0.0;
  r.score = score * r.brevity_factor;
  return r;
}

RecallResult rare_word_recall(std::span<const Sentence> hypotheses,
                              std::span<const Sentence> references,
                              std::span<const Sentence> training_targets, int threshold,
                              RareWordScope scope) {
  if (threshold < 1) throw Error("rare word threshold must be >= 1");
  if (hypotheses.size() != references.size())
    throw Error("recall: hypothesis and reference counts differ");
  std::unordered_map<std::string, long> train_count, ref_count;
  for (const auto& s : training_targets)
    for (const auto& w : s) ++train_count[w];
  for (const auto& s : references)
    for (const auto& w : s) ++ref_count[w];
  auto is_rare = [&](const std::string& w) {
    auto it = train_count.find(w);
    const long in_train = it == train_count.end() ? 0 : it->second;
    if (in_train < threshold) return true;
    return scope == RareWordScope::either && ref_count[w] < threshold;
  };

  RecallResult r;
  for (std::size_t i = 0; i < references.size(); ++i) {
    std::map<std::string, long> ref_rare, hyp;
    for (const auto& w : references[i])
      if (is_rare(w)) ++ref_rare[w];
    for (const auto& w : hypotheses[i]) ++hyp[w];
    for (const auto& [w, c] : ref_rare) {
      r.total += c;
      auto it = hyp.find(w);
      if (it != hyp.end()) r.recovered += std::min(c, it->second);
    }
  }
  r.recall = r.total ? 100.0 * static_cast<double>(r.recovered) / static_cast<double>(r.total) : 100.0;
  return r;
}

BootstrapResult paired_bootstrap(std::span<const Sentence> system_a,
                                 std::span<const Sentence> system_b,
                                 std::span<const Sentence> references, int iterations,
                                 std::uint64_t seed) {
  if (iterations < 1) throw Error("bootstrap needs at least one iteration");
  if (system_a.size() != references.size() || system_b.size() != references.size())
    throw Error("bootstrap: systems and references must have the same number of sentences");
  if (references.empty()) throw Error("bootstrap: empty test set");
  const auto N = references.size();
  std::vector<BleuStats> a(N), b(N);
  BleuStats total_a, total_b;
  for (std::size_t i = 0; i < N; ++i) {
    a[i] = bleu_stats(system_a[i], references[i]);
    b[i] = bleu_stats(system_b[i], references[i]);
    total_a += a[i];
    total_b += b[i];
  }
  BootstrapResult r;
  r.iterations = iterations;
  r.bleu_a = bleu_from_stats(total_a);
  r.bleu_b = bleu_from_stats(total_b);
  std::uniform_int_distribution<std::size_t> pick(0, N - 1);
  for (int it = 0; it < iterations; ++it) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(it)));
    BleuStats sa, sb;
    for (std::size_t k = 0; k < N; ++k) {
      const auto i = pick(rng);
      sa += a[i];
      sb += b[i];
    }
    const double ba = bleu_from_stats(sa), bb = bleu_from_stats(sb);
    if (ba > bb)
      ++r.wins_a;
    else if (bb > ba)
      ++r.wins_b;
    else
      ++r.ties;
  }
  r.p_a_better = 1.0 - static_cast<double>(r.wins_a) / iterations;
  r.p_b_better = 1.0 - static_cast<double>(r.wins_b) / iterations;
  return r;
}

double attention_entropy(std::span<const Vec> attention) {
  if (attention.empty()) return 0.0;
  double total = 0.0;
  for (const auto& a : attention) {
    if (std::abs(a.sum() - 1.0) > 1e-6 || (a.array() < 0.0).any())
      throw Error("attention vector is not a distribution");
    for (Eigen::Index j = 0; j < a.size(); ++j)
      if (a(j) > 0.0) total -= a(j) * std::log2(a(j));
  }
  return total / static_cast<double>(attention.size());
}

}  // namespace lexnmt
