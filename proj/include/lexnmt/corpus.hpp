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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexnmt {

inline constexpr int kUnk = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kNumReserved = 3;

inline const std::string kUnkToken = "<unk>";
inline const std::string kBosToken = "<s>";
inline const std::string kEosToken = "</s>";

using Sentence = std::vector<std::string>;

// Token <-> id bijection. Ids 0..2 are reserved; corpus tokens start at 3 and
// are ordered by descending frequency, then lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary build(std::span<const Sentence> sentences, int threshold,
                          std::string language = {});
  static Vocabulary load(const std::filesystem::path& path, std::string language = {});
  void save(const std::filesystem::path& path) const;
  std::string serialize() const;

  // Out-of-vocabulary tokens (and literal reserved symbols) map to kUnk.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  int threshold() const { return threshold_; }
  const std::string& language() const { return language_; }

  std::vector<int> encode_source(std::span<const std::string> tokens) const;
  // Appends kEos.
  std::vector<int> encode_target(std::span<const std::string> tokens) const;
  // Stops at the first kEos; never emits reserved BOS/EOS symbols.
  Sentence decode(std::span<const int> ids) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && threshold_ == other.threshold_;
  }

 private:
  std::vector<std::string> tokens_{kUnkToken, kBosToken, kEosToken};
  std::unordered_map<std::string, int> index_;
  int threshold_ = 1;
  std::string language_;
};

inline Vocabulary build_vocab(std::span<const Sentence> sentences, int threshold,
                              std::string language = {}) {
  return Vocabulary::build(sentences, threshold, std::move(language));
}

struct SentencePair {
  Sentence source;
  Sentence target;
};

struct ParallelCorpus {
  std::vector<SentencePair> pairs;
  // Lines dropped at ingestion because either side was empty.
  std::size_t dropped_empty = 0;

  static ParallelCorpus load(const std::filesystem::path& source_path,
                             const std::filesystem::path& target_path);
  static ParallelCorpus from_lines(std::span<const std::string> source_lines,
                                   std::span<const std::string> target_lines);

  std::vector<Sentence> source_side() const;
  std::vector<Sentence> target_side() const;
  std::size_t size() const { return pairs.size(); }
};

std::vector<Sentence> load_sentences(const std::filesystem::path& path);

struct EncodedPair {
  std::vector<int> source;
  std::vector<int> target;  // terminated by kEos
};

std::vector<EncodedPair> encode_corpus(const ParallelCorpus& corpus, const Vocabulary& source_vocab,
                                       const Vocabulary& target_vocab);

struct Batch {
  // Row-major padded id matrices; padding positions hold kUnk and are masked.
  std::vector<std::vector<int>> source;
  std::vector<std::vector<int>> target;
  std::vector<std::vector<std::uint8_t>> source_mask;
  std::vector<std::vector<std::uint8_t>> target_mask;
  std::vector<int> source_lengths;
  std::vector<int> target_lengths;
  // Position of every row in the corpus the batch was cut from.
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  std::span<const int> source_row(std::size_t i) const {
    return {source[i].data(), static_cast<std::size_t>(source_lengths[i])};
  }
  std::span<const int> target_row(std::size_t i) const {
    return {target[i].data(), static_cast<std::size_t>(target_lengths[i])};
  }
};

struct BatchOptions {
  int batch_size = 32;
  int max_len = 50;
  std::uint64_t seed = 1;
  bool group_by_length = true;
};

// Pairs with either side longer than max_len (target counted without EOS)
// are dropped. Batch order is shuffled with a generator keyed on (seed, epoch).
std::vector<Batch> make_batches(std::span<const EncodedPair> pairs, const BatchOptions& options,
                                int epoch = 0);

}  // namespace lexnmt
