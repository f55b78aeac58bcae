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


#include "lexnmt/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "lexnmt/io.hpp"

namespace lexnmt {

namespace {

constexpr double kSumTolerance = 1e-6;

const LexDistribution& unk_indicator() {
  static const LexDistribution dist{{kUnk, 1.0}};
  return dist;
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", p);
  return buf;
}

}  // namespace

std::string to_string(LexiconKind kind) {
  switch (kind) {
    case LexiconKind::automatic: return "auto";
    case LexiconKind::manual: return "manual";
    case LexiconKind::hybrid: return "hybrid";
  }
  return "auto";
}

LexiconKind parse_lexicon_kind(const std::string& name) {
  if (name == "auto") return LexiconKind::automatic;
  if (name == "manual") return LexiconKind::manual;
  if (name == "hybrid") return LexiconKind::hybrid;
  throw Error("unknown lexicon kind: " + name);
}

Lexicon::Lexicon(LexiconKind kind, std::shared_ptr<const Vocabulary> source_vocab,
                 std::shared_ptr<const Vocabulary> target_vocab)
    : kind_(kind),
      source_vocab_(std::move(source_vocab)),
      target_vocab_(std::move(target_vocab)) {
  if (!source_vocab_ || !target_vocab_) throw Error("lexicon requires both vocabularies");
  dists_.resize(static_cast<std::size_t>(source_vocab_->size()));
}

void Lexicon::check_source(int source) const {
  if (source < 0 || source >= source_size())
    throw Error("lexicon source id out of range: " + std::to_string(source));
}

void Lexicon::set(int source, LexDistribution dist) {
  check_source(source);
  std::sort(dist.begin(), dist.end(),
            [](const LexEntry& a, const LexEntry& b) { return a.target < b.target; });
  LexDistribution merged;
  for (const auto& e : dist) {
    if (e.target < 0 || e.target >= target_vocab_->size())
      throw Error("lexicon target id out of range: " + std::to_string(e.target));
    if (e.prob < 0.0 || !std::isfinite(e.prob)) throw Error("lexicon probability out of range");
    if (!merged.empty() && merged.back().target == e.target)
      merged.back().prob += e.prob;
    else
      merged.push_back(e);
  }
  std::erase_if(merged, [](const LexEntry& e) { return e.prob == 0.0; });
  dists_[source] = std::move(merged);
}

void Lexicon::erase(int source) {
  check_source(source);
  dists_[source].clear();
}

bool Lexicon::has(int source) const {
  return source >= 0 && source < source_size() && !dists_[source].empty();
}

bool Lexicon::covered(int source) const {
  if (!has(source)) return false;
  return std::any_of(dists_[source].begin(), dists_[source].end(),
                     [](const LexEntry& e) { return e.target != kUnk && e.prob > 0.0; });
}

const LexDistribution& Lexicon::query(int source) const {
  return has(source) ? dists_[source] : unk_indicator();
}

double Lexicon::probability(int source, int target) const {
  for (const auto& e : query(source))
    if (e.target == target) return e.prob;
  return 0.0;
}

int Lexicon::best_target(int source) const {
  if (!has(source)) return -1;
  int best = -1;
  double best_p = 0.0;
  for (const auto& e : dists_[source]) {
    if (e.target == kUnk) continue;
    if (e.prob > best_p) {
      best = e.target;
      best_p = e.prob;
    }
  }
  return best;
}

std::vector<int> Lexicon::sources() const {
  std::vector<int> out;
  for (int f = 0; f < source_size(); ++f)
    if (has(f)) out.push_back(f);
  return out;
}

std::vector<int> Lexicon::covered_sources() const {
  std::vector<int> out;
  for (int f = 0; f < source_size(); ++f)
    if (covered(f)) out.push_back(f);
  return out;
}

bool Lexicon::same_vocabularies(const Lexicon& other) const {
  auto same = [](const std::shared_ptr<const Vocabulary>& a,
                 const std::shared_ptr<const Vocabulary>& b) { return a == b || *a == *b; };
  return same(source_vocab_, other.source_vocab_) && same(target_vocab_, other.target_vocab_);
}

std::string Lexicon::serialize() const {
  std::ostringstream out;
  out << "#kind=" << to_string(kind_) << '\n';
  for (int f = 0; f < source_size(); ++f) {
    if (dists_[f].empty()) continue;
    auto entries = dists_[f];
    std::stable_sort(entries.begin(), entries.end(),
                     [](const LexEntry& a, const LexEntry& b) { return a.prob > b.prob; });
    for (const auto& e : entries)
      out << source_vocab_->token(f) << '\t' << target_vocab_->token(e.target) << '\t'
          << format_prob(e.prob) << '\n';
  }
  return out.str();
}

void Lexicon::save(const std::filesystem::path& path) const { write_text_atomic(path, serialize()); }

Lexicon Lexicon::parse(const std::vector<std::string>& lines,
                       std::shared_ptr<const Vocabulary> source_vocab,
                       std::shared_ptr<const Vocabulary> target_vocab) {
  if (lines.empty() || lines[0].rfind("#kind=", 0) != 0)
    throw Error("lexicon file missing '#kind=' header");
  Lexicon lex(parse_lexicon_kind(lines[0].substr(6)), std::move(source_vocab),
              std::move(target_vocab));
  std::map<int, LexDistribution> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(lines[i]);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 3)
      throw Error("malformed lexicon line " + std::to_string(i + 1) + ": expected 3 fields");
    const auto& src = fields[0];
    const auto& trg = fields[1];
    int f = src == kUnkToken ? kUnk : lex.source_vocab_->id(src);
    if (f == kUnk && src != kUnkToken)
      throw Error("lexicon line " + std::to_string(i + 1) + ": source token not in vocabulary: " +
                  src);
    int e = trg == kUnkToken ? kUnk : lex.target_vocab_->id(trg);
    if (e == kUnk && trg != kUnkToken)
      throw Error("lexicon line " + std::to_string(i + 1) + ": target token not in vocabulary: " +
                  trg);
    double p;
    try {
      std::size_t used = 0;
      p = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("lexicon line " + std::to_string(i + 1) + ": bad probability");
    }
    rows[f].push_back({e, p});
  }
  for (auto& [f, dist] : rows) {
    double sum = 0.0;
    for (const auto& e : dist) sum += e.prob;
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw Error("lexicon distribution for '" + lex.source_vocab_->token(f) +
                  "' does not sum to 1");
    lex.set(f, std::move(dist));
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path,
                      std::shared_ptr<const Vocabulary> source_vocab,
                      std::shared_ptr<const Vocabulary> target_vocab) {
  try {
    return parse(read_lines(path), std::move(source_vocab), std::move(target_vocab));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

// --- IBM Model 1 -----------------------------------------------------------

Ibm1Model::Ibm1Model(std::span<const EncodedPair> pairs, int source_vocab_size, bool null_word)
    : source_vocab_size_(source_vocab_size), null_word_(null_word) {
  if (pairs.empty()) throw Error("IBM Model 1 needs a nonempty corpus");
  rows_.resize(static_cast<std::size_t>(source_vocab_size) + 1);
  std::vector<std::set<int>> cooc(rows_.size());
  for (const auto& p : pairs) {
    std::vector<int> src = p.source;
    std::vector<int> trg = p.target;
    if (!trg.empty() && trg.back() == kEos) trg.pop_back();
    if (trg.empty()) throw Error("IBM Model 1: empty target sentence");
    if (src.empty()) throw Error("IBM Model 1: empty source sentence");
    for (int f : src)
      if (f < 0 || f >= source_vocab_size) throw Error("IBM Model 1: source id out of range");
    if (null_word) src.push_back(null_source());
    for (int f : src) cooc[f].insert(trg.begin(), trg.end());
    corpus_.emplace_back(std::move(src), std::move(trg));
  }
  for (std::size_t f = 0; f < rows_.size(); ++f) {
    rows_[f].targets.assign(cooc[f].begin(), cooc[f].end());
    rows_[f].probs.assign(rows_[f].targets.size(),
                          cooc[f].empty() ? 0.0 : 1.0 / static_cast<double>(cooc[f].size()));
  }
}

std::size_t Ibm1Model::slot(int source, int target) const {
  const auto& t = rows_[source].targets;
  return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), target) - t.begin());
}

double Ibm1Model::probability(int source, int target) const {
  if (source < 0 || source >= static_cast<int>(rows_.size())) return 0.0;
  const auto& row = rows_[source];
  auto k = slot(source, target);
  return k < row.targets.size() && row.targets[k] == target ? row.probs[k] : 0.0;
}

double Ibm1Model::log_likelihood() const {
  double ll = 0.0;
  for (const auto& [src, trg] : corpus_) {
    const double norm = std::log(static_cast<double>(src.size()));
    for (int e : trg) {
      double z = 0.0;
      for (int f : src) z += probability(f, e);
      ll += std::log(z) - norm;
    }
  }
  return ll;
}

double Ibm1Model::iterate() {
  std::vector<std::vector<double>> counts(rows_.size());
  for (std::size_t f = 0; f < rows_.size(); ++f) counts[f].assign(rows_[f].targets.size(), 0.0);

  double ll = 0.0;
  std::vector<std::size_t> slots;
  for (const auto& [src, trg] : corpus_) {
    const double norm = std::log(static_cast<double>(src.size()));
    for (int e : trg) {
      slots.clear();
      double z = 0.0;
      for (int f : src) {
        auto k = slot(f, e);
        slots.push_back(k);
        z += rows_[f].probs[k];
      }
      ll += std::log(z) - norm;
      for (std::size_t j = 0; j < src.size(); ++j)
        counts[src[j]][slots[j]] += rows_[src[j]].probs[slots[j]] / z;
    }
  }

  for (std::size_t f = 0; f < rows_.size(); ++f) {
    double total = 0.0;
    for (double c : counts[f]) total += c;
    if (total <= 0.0) continue;
    for (std::size_t k = 0; k < counts[f].size(); ++k) rows_[f].probs[k] = counts[f][k] / total;
  }
  ++iterations_;
  return ll;
}

Lexicon Ibm1Model::to_lexicon(std::shared_ptr<const Vocabulary> source_vocab,
                              std::shared_ptr<const Vocabulary> target_vocab,
                              double prune_floor) const {
  if (source_vocab->size() != source_vocab_size_)
    throw Error("IBM Model 1 table does not match the source vocabulary");
  Lexicon lex(LexiconKind::automatic, std::move(source_vocab), std::move(target_vocab));
  for (int f = 0; f < source_vocab_size_; ++f) {
    const auto& row = rows_[f];
    if (row.targets.empty()) continue;
    LexDistribution dist;
    for (std::size_t k = 0; k < row.targets.size(); ++k)
      if (row.targets[k] != kUnk && row.probs[k] >= prune_floor)
        dist.push_back({row.targets[k], row.probs[k]});
    lex.set(f, std::move(dist));
    if (!lex.has(f)) lex.set(f, {{kUnk, 1.0}});
  }
  return allocate_unk(std::move(lex));
}

Ibm1Result train_ibm1(std::span<const EncodedPair> pairs,
                      std::shared_ptr<const Vocabulary> source_vocab,
                      std::shared_ptr<const Vocabulary> target_vocab, const Ibm1Options& options) {
  if (options.iterations < 1) throw Error("IBM Model 1 needs at least one iteration");
  Ibm1Model model(pairs, source_vocab->size(), options.null_word);
  std::vector<double> history;
  for (int it = 0; it < options.iterations; ++it) history.push_back(model.iterate());
  history.push_back(model.log_likelihood());
  return {model.to_lexicon(std::move(source_vocab), std::move(target_vocab), options.prune_floor),
          std::move(history)};
}

// --- manual / hybrid -------------------------------------------------------

std::vector<DictionaryEntry> read_dictionary(const std::filesystem::path& path) {
  std::vector<DictionaryEntry> out;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw Error(path.string() + ": malformed dictionary line " + std::to_string(i + 1));
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    if (out.back().first.empty() || out.back().second.empty())
      throw Error(path.string() + ": empty token on dictionary line " + std::to_string(i + 1));
  }
  return out;
}

Lexicon load_manual(std::span<const DictionaryEntry> entries,
                    std::shared_ptr<const Vocabulary> source_vocab,
                    std::shared_ptr<const Vocabulary> target_vocab, std::size_t* skipped) {
  if (entries.empty()) throw Error("manual lexicon needs at least one dictionary entry");
  Lexicon lex(LexiconKind::manual, source_vocab, target_vocab);
  std::map<int, std::set<std::string>> translations;
  std::size_t n_skipped = 0;
  for (const auto& [src, trg] : entries) {
    if (!source_vocab->contains(src)) {
      ++n_skipped;
      continue;
    }
    translations[source_vocab->id(src)].insert(trg);
  }
  for (const auto& [f, targets] : translations) {
    const double p = 1.0 / static_cast<double>(targets.size());
    LexDistribution dist;
    for (const auto& t : targets)
      if (target_vocab->contains(t)) dist.push_back({target_vocab->id(t), p});
    // Out-of-vocabulary translations are left out here; allocate_unk gives
    // their share to unk.
    lex.set(f, std::move(dist));
    if (!lex.has(f)) lex.set(f, {{kUnk, 1.0}});
  }
  if (skipped) *skipped = n_skipped;
  return allocate_unk(std::move(lex));
}

Lexicon allocate_unk(Lexicon lexicon) {
  for (int f : lexicon.sources()) {
    LexDistribution dist;
    double mass = 0.0;
    for (const auto& e : lexicon.query(f)) {
      if (e.target == kUnk) continue;
      dist.push_back(e);
      mass += e.prob;
    }
    if (mass > 1.0 + kSumTolerance)
      throw Error("corrupt lexicon: in-vocabulary mass " + std::to_string(mass) + " for '" +
                  lexicon.source_vocab().token(f) + "'");
    if (mass > 1.0) {
      for (auto& e : dist) e.prob /= mass;
    } else if (mass < 1.0) {
      dist.push_back({kUnk, 1.0 - mass});
    }
    lexicon.set(f, std::move(dist));
  }
  return lexicon;
}

Lexicon hybrid(const Lexicon& automatic, const Lexicon& manual) {
  if (!automatic.same_vocabularies(manual))
    throw Error("hybrid lexicon: automatic and manual lexicons use different vocabularies");
  Lexicon out(LexiconKind::hybrid, automatic.source_vocab_ptr(), automatic.target_vocab_ptr());
  for (int f = 0; f < automatic.source_size(); ++f) {
    if (automatic.covered(f))
      out.set(f, automatic.query(f));
    else if (manual.has(f))
      out.set(f, manual.query(f));
    else if (automatic.has(f))
      out.set(f, automatic.query(f));
  }
  return out;
}

// --- per-sentence matrix ---------------------------------------------------

LexiconMatrix build_matrix(const Lexicon& lexicon, std::span<const int> source) {
  const int rows = lexicon.target_vocab().size();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t j = 0; j < source.size(); ++j) {
    int f = source[j];
    const auto& dist = (f >= 0 && f < lexicon.source_size()) ? lexicon.query(f)
                                                             : lexicon.query(-1);
    for (const auto& e : dist)
      triplets.emplace_back(e.target, static_cast<int>(j), e.prob);
  }
  LexiconMatrix::Sparse m(rows, static_cast<Eigen::Index>(source.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return LexiconMatrix(std::move(m));
}

Eigen::VectorXd lexicon_predictive(const LexiconMatrix& matrix, const Eigen::VectorXd& attention) {
  if (attention.size() != matrix.cols())
    throw Error("lexicon_predictive: attention has " + std::to_string(attention.size()) +
                " entries but the matrix has " + std::to_string(matrix.cols()) + " columns");
  return matrix.matrix() * attention;
}

}  // namespace lexnmt
