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

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lexnmt/corpus.hpp"

namespace lexnmt {

enum class LexiconKind { automatic, manual, hybrid };

std::string to_string(LexiconKind kind);
LexiconKind parse_lexicon_kind(const std::string& name);

struct LexEntry {
  int target;
  double prob;
  bool operator==(const LexEntry&) const = default;
};

// p(e|f) for every target e with nonzero mass, sorted by target id. The
// kUnk entry carries whatever mass the in-vocabulary targets leave over.
using LexDistribution = std::vector<LexEntry>;

// Sparse source-id -> distribution map indexed against a fixed pair of
// vocabularies. A source is "covered" when its distribution has at least one
// entry other than kUnk.
class Lexicon {
 public:
  Lexicon(LexiconKind kind, std::shared_ptr<const Vocabulary> source_vocab,
          std::shared_ptr<const Vocabulary> target_vocab);

  LexiconKind kind() const { return kind_; }
  const Vocabulary& source_vocab() const { return *source_vocab_; }
  const Vocabulary& target_vocab() const { return *target_vocab_; }
  std::shared_ptr<const Vocabulary> source_vocab_ptr() const { return source_vocab_; }
  std::shared_ptr<const Vocabulary> target_vocab_ptr() const { return target_vocab_; }

  // Replaces the distribution of `source`. Entries are sorted and merged;
  // normalization is the caller's business (see allocate_unk).
  void set(int source, LexDistribution dist);
  void erase(int source);

  bool has(int source) const;
  bool covered(int source) const;
  // Stored distribution, or the unk indicator when the source has none.
  const LexDistribution& query(int source) const;
  double probability(int source, int target) const;
  // Most probable non-unk target (lowest id on ties), or -1 when uncovered.
  int best_target(int source) const;

  std::vector<int> sources() const;
  std::vector<int> covered_sources() const;
  int source_size() const { return static_cast<int>(dists_.size()); }

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;
  static Lexicon parse(const std::vector<std::string>& lines,
                       std::shared_ptr<const Vocabulary> source_vocab,
                       std::shared_ptr<const Vocabulary> target_vocab);
  static Lexicon load(const std::filesystem::path& path,
                      std::shared_ptr<const Vocabulary> source_vocab,
                      std::shared_ptr<const Vocabulary> target_vocab);

  bool same_vocabularies(const Lexicon& other) const;
  bool operator==(const Lexicon& other) const {
    return kind_ == other.kind_ && dists_ == other.dists_;
  }

 private:
  void check_source(int source) const;

  LexiconKind kind_;
  std::shared_ptr<const Vocabulary> source_vocab_;
  std::shared_ptr<const Vocabulary> target_vocab_;
  std::vector<LexDistribution> dists_;
};

struct Ibm1Options {
  int iterations = 10;
  bool null_word = false;
  // Probabilities below this after EM are dropped and their mass folded into unk.
  double prune_floor = 1e-7;
};

// IBM Model 1 translation table t(e|f) trained by EM. The table only holds
// (f, e) pairs that co-occur in some sentence pair; initialization is
// uniform over each source word's co-occurring targets.
class Ibm1Model {
 public:
  // Pairs are id sequences; a trailing kEos on the target side is ignored.
  Ibm1Model(std::span<const EncodedPair> pairs, int source_vocab_size, bool null_word);

  // One E-step + M-step. Returns the corpus log-likelihood of the parameters
  // *before* the update.
  double iterate();
  double log_likelihood() const;

  double probability(int source, int target) const;
  // Source id used for the NULL word when enabled.
  int null_source() const { return source_vocab_size_; }
  bool null_word() const { return null_word_; }
  int iterations_done() const { return iterations_; }

  // Builds the auto lexicon: entries below `prune_floor` are pruned and the
  // unk entry receives the remainder.
  Lexicon to_lexicon(std::shared_ptr<const Vocabulary> source_vocab,
                     std::shared_ptr<const Vocabulary> target_vocab, double prune_floor) const;

 private:
  struct Row {
    std::vector<int> targets;  // sorted
    std::vector<double> probs;
  };
  std::size_t slot(int source, int target) const;

  std::vector<std::pair<std::vector<int>, std::vector<int>>> corpus_;
  std::vector<Row> rows_;
  int source_vocab_size_;
  bool null_word_;
  int iterations_ = 0;
};

struct Ibm1Result {
  Lexicon lexicon;
  // log_likelihood[k] is the corpus log-likelihood before iteration k;
  // the last element is the likelihood of the returned parameters.
  std::vector<double> log_likelihood;
};

Ibm1Result train_ibm1(std::span<const EncodedPair> pairs,
                      std::shared_ptr<const Vocabulary> source_vocab,
                      std::shared_ptr<const Vocabulary> target_vocab, const Ibm1Options& options);

using DictionaryEntry = std::pair<std::string, std::string>;

std::vector<DictionaryEntry> read_dictionary(const std::filesystem::path& path);

// Uniform distribution over each source word's dictionary translations. Entries
// whose source token is not in the source vocabulary are skipped and counted.
Lexicon load_manual(std::span<const DictionaryEntry> entries,
                    std::shared_ptr<const Vocabulary> source_vocab,
                    std::shared_ptr<const Vocabulary> target_vocab,
                    std::size_t* skipped = nullptr);

// p(unk|f) = 1 - sum of in-vocabulary mass. Throws if some source already
// carries more than 1 + 1e-6 in-vocabulary mass.
Lexicon allocate_unk(Lexicon lexicon);

// Fill-up: the automatic distribution where the source is covered there,
// otherwise the manual one.
Lexicon hybrid(const Lexicon& automatic, const Lexicon& manual);

// |V_e| x |F| column-stochastic matrix; column j is p(.|f_j).
class LexiconMatrix {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor>;

  LexiconMatrix() = default;
  explicit LexiconMatrix(Sparse matrix) : matrix_(std::move(matrix)) {}

  int rows() const { return static_cast<int>(matrix_.rows()); }
  int cols() const { return static_cast<int>(matrix_.cols()); }
  const Sparse& matrix() const { return matrix_; }
  Eigen::VectorXd column(int j) const { return Eigen::VectorXd(matrix_.col(j)); }

 private:
  Sparse matrix_;
};

LexiconMatrix build_matrix(const Lexicon& lexicon, std::span<const int> source);

// L_F a: the attention-weighted lexicon distribution over target words.
Eigen::VectorXd lexicon_predictive(const LexiconMatrix& matrix, const Eigen::VectorXd& attention);

}  // namespace lexnmt
