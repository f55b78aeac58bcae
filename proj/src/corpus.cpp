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


#include "lexnmt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "lexnmt/io.hpp"

namespace lexnmt {

namespace {

bool is_reserved(std::string_view token) {
  return token == kUnkToken || token == kBosToken || token == kEosToken;
}

}  // namespace

Vocabulary Vocabulary::build(std::span<const Sentence> sentences, int threshold,
                             std::string language) {
  if (threshold < 1) throw Error("vocabulary threshold must be >= 1");
  if (sentences.empty()) throw Error("cannot build a vocabulary from an empty corpus");

  std::unordered_map<std::string, long> counts;
  for (const auto& sentence : sentences)
    for (const auto& token : sentence) ++counts[token];

  std::vector<std::pair<std::string, long>> kept;
  for (auto& [token, count] : counts)
    if (count >= threshold && !is_reserved(token)) kept.emplace_back(token, count);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary vocab;
  vocab.threshold_ = threshold;
  vocab.language_ = std::move(language);
  for (auto& [token, count] : kept) {
    vocab.index_.emplace(token, vocab.size());
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << "#u=" << threshold_ << '\n';
  for (int i = kNumReserved; i < size(); ++i) out << tokens_[i] << '\n';
  return out.str();
}

void Vocabulary::save(const std::filesystem::path& path) const {
  write_text_atomic(path, serialize());
}

Vocabulary Vocabulary::load(const std::filesystem::path& path, std::string language) {
  auto lines = read_lines(path);
  if (lines.empty() || lines[0].rfind("#u=", 0) != 0)
    throw Error("vocabulary file missing '#u=' header: " + path.string());
  Vocabulary vocab;
  try {
    vocab.threshold_ = std::stoi(lines[0].substr(3));
  } catch (const std::exception&) {
    throw Error("malformed vocabulary header: " + path.string());
  }
  vocab.language_ = std::move(language);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& token = lines[i];
    if (token.empty() || is_reserved(token) || token.find_first_of(" \t") != std::string::npos)
      throw Error("malformed vocabulary entry at line " + std::to_string(i + 1) + ": " +
                  path.string());
    if (!vocab.index_.emplace(token, vocab.size()).second)
      throw Error("duplicate vocabulary entry '" + token + "': " + path.string());
    vocab.tokens_.push_back(token);
  }
  return vocab;
}

int Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw Error("token id out of range: " + std::to_string(id));
  return tokens_[id];
}

std::vector<int> Vocabulary::encode_source(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<int> Vocabulary::encode_target(std::span<const std::string> tokens) const {
  auto ids = encode_source(tokens);
  ids.push_back(kEos);
  return ids;
}

Sentence Vocabulary::decode(std::span<const int> ids) const {
  Sentence out;
  for (int id : ids) {
    if (id == kEos) break;
    if (id == kBos) continue;
    out.push_back(id >= 0 && id < size() ? tokens_[id] : kUnkToken);
  }
  return out;
}

ParallelCorpus ParallelCorpus::from_lines(std::span<const std::string> source_lines,
                                          std::span<const std::string> target_lines) {
  if (source_lines.size() != target_lines.size())
    throw Error("parallel corpus line count mismatch: " + std::to_string(source_lines.size()) +
                " vs " + std::to_string(target_lines.size()));
  ParallelCorpus corpus;
  for (std::size_t i = 0; i < source_lines.size(); ++i) {
    SentencePair pair{split_tokens(source_lines[i]), split_tokens(target_lines[i])};
    if (pair.source.empty() || pair.target.empty()) {
      ++corpus.dropped_empty;
      continue;
    }
    corpus.pairs.push_back(std::move(pair));
  }
  return corpus;
}

ParallelCorpus ParallelCorpus::load(const std::filesystem::path& source_path,
                                    const std::filesystem::path& target_path) {
  auto src = read_lines(source_path);
  auto trg = read_lines(target_path);
  return from_lines(src, trg);
}

std::vector<Sentence> ParallelCorpus::source_side() const {
  std::vector<Sentence> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.source);
  return out;
}

std::vector<Sentence> ParallelCorpus::target_side() const {
  std::vector<Sentence> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.target);
  return out;
}

std::vector<Sentence> load_sentences(const std::filesystem::path& path) {
  std::vector<Sentence> out;
  for (const auto& line : read_lines(path)) out.push_back(split_tokens(line));
  return out;
}

std::vector<EncodedPair> encode_corpus(const ParallelCorpus& corpus, const Vocabulary& source_vocab,
                                       const Vocabulary& target_vocab) {
  std::vector<EncodedPair> out;
  out.reserve(corpus.size());
  for (const auto& p : corpus.pairs)
    out.push_back({source_vocab.encode_source(p.source), target_vocab.encode_target(p.target)});
  return out;
}

std::vector<Batch> make_batches(std::span<const EncodedPair> pairs, const BatchOptions& options,
                                int epoch) {
  if (options.batch_size < 1) throw Error("batch size must be >= 1");

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    const auto target_len = p.target.empty() || p.target.back() != kEos ? p.target.size()
                                                                         : p.target.size() - 1;
    if (p.source.empty() || static_cast<int>(p.source.size()) > options.max_len ||
        static_cast<int>(target_len) > options.max_len)
      continue;
    order.push_back(i);
  }
  if (order.empty()) throw Error("no training pairs left after length filtering");

  std::mt19937_64 rng(mix_seed(options.seed, static_cast<std::uint64_t>(epoch)));
  std::shuffle(order.begin(), order.end(), rng);
  if (options.group_by_length) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pairs[a].source.size() < pairs[b].source.size();
    });
  }

  std::vector<Batch> batches;
  const auto B = static_cast<std::size_t>(options.batch_size);
  for (std::size_t start = 0; start < order.size(); start += B) {
    Batch batch;
    const auto end = std::min(order.size(), start + B);
    std::size_t src_max = 0, trg_max = 0;
    for (auto k = start; k < end; ++k) {
      src_max = std::max(src_max, pairs[order[k]].source.size());
      trg_max = std::max(trg_max, pairs[order[k]].target.size());
    }
    for (auto k = start; k < end; ++k) {
      const auto& p = pairs[order[k]];
      auto pad = [](const std::vector<int>& ids, std::size_t width, std::vector<int>& row,
                    std::vector<std::uint8_t>& mask) {
        row.assign(width, kUnk);
        mask.assign(width, 0);
        std::copy(ids.begin(), ids.end(), row.begin());
        std::fill(mask.begin(), mask.begin() + static_cast<long>(ids.size()), 1);
      };
      batch.source.emplace_back();
      batch.source_mask.emplace_back();
      batch.target.emplace_back();
      batch.target_mask.emplace_back();
      pad(p.source, src_max, batch.source.back(), batch.source_mask.back());
      pad(p.target, trg_max, batch.target.back(), batch.target_mask.back());
      batch.source_lengths.push_back(static_cast<int>(p.source.size()));
      batch.target_lengths.push_back(static_cast<int>(p.target.size()));
      batch.indices.push_back(order[k]);
    }
    batches.push_back(std::move(batch));
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

}  // namespace lexnmt
