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


#include "commands.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "lexnmt/config.hpp"
#include "lexnmt/corpus.hpp"
#include "lexnmt/decode.hpp"
#include "lexnmt/eval.hpp"
#include "lexnmt/io.hpp"
#include "lexnmt/lexicon.hpp"
#include "lexnmt/model.hpp"
#include "lexnmt/trainer.hpp"

namespace lexnmt::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
using Clock = std::chrono::steady_clock;
using json = nlohmann::ordered_json;

const std::string& require(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end() || it->second.empty()) throw Error("missing required option --" + key);
  return it->second;
}

std::optional<std::string> lookup(const Settings& s, const std::string& key) {
  auto it = s.find(key);
  if (it == s.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

bool flag(const Settings& s, const std::string& key) {
  auto v = lookup(s, key);
  return v && (*v == "true" || *v == "1" || *v == "yes");
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error("option --" + key + " expects an integer, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error("option --" + key + " expects a number, got '" + v + "'");
}

RunConfig run_config(const Settings& s) {
  auto cfg = profile_defaults(lookup(s, "profile").value_or("desk"));
  cfg.command = lookup(s, "command").value_or("");
  const std::map<std::string, int*> ints = {
      {"threshold", &cfg.threshold},   {"layers", &cfg.layers},         {"hidden", &cfg.hidden},
      {"embed", &cfg.embed},           {"batch-size", &cfg.batch_size}, {"epochs", &cfg.epochs},
      {"beam", &cfg.beam},             {"max-len", &cfg.max_len},
      {"ibm-iterations", &cfg.ibm_iterations}};
  const std::map<std::string, double*> doubles = {{"epsilon", &cfg.epsilon},
                                                  {"eos-discount", &cfg.eos_discount},
                                                  {"dropout", &cfg.dropout},
                                                  {"learning-rate", &cfg.learning_rate}};
  for (const auto& [k, p] : ints)
    if (auto v = lookup(s, k)) *p = to_int(k, *v);
  for (const auto& [k, p] : doubles)
    if (auto v = lookup(s, k)) *p = to_double(k, *v);
  if (auto v = lookup(s, "seed")) {
    try {
      cfg.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw Error("option --seed expects a non-negative integer");
    }
  }
  if (auto v = lookup(s, "mode")) cfg.mode = parse_mode(*v);
  return cfg;
}

json config_json(const RunConfig& c) {
  return json{{"command", c.command},       {"profile", c.profile},
              {"mode", to_string(c.mode)},  {"lexicon_kind", c.lexicon_kind},
              {"threshold", c.threshold},   {"layers", c.layers},
              {"hidden", c.hidden},         {"embed", c.embed},
              {"batch_size", c.batch_size}, {"epochs", c.epochs},
              {"beam", c.beam},             {"epsilon", c.epsilon},
              {"eos_discount", c.eos_discount}, {"dropout", c.dropout},
              {"learning_rate", c.learning_rate}, {"max_len", c.max_len},
              {"ibm_iterations", c.ibm_iterations}, {"seed", c.seed}};
}

// Run metadata lives beside the primary output and is the only artifact
// that records wallclock time.
void write_manifest(const std::string& out, const Settings& s, const RunConfig& cfg,
                    Clock::time_point start, const std::vector<std::string>& outputs) {
  json settings = json::object();
  for (const auto& [k, v] : s) settings[k] = v;
  json j{{"command", cfg.command},
         {"version", kVersion},
         {"seed", cfg.seed},
         {"config", config_json(cfg)},
         {"settings", settings},
         {"outputs", outputs},
         {"wallclock_seconds",
          std::chrono::duration<double>(Clock::now() - start).count()}};
  write_text_atomic(out + ".manifest.json", j.dump(2) + "\n");
}

std::shared_ptr<const Vocabulary> load_vocab(const Settings& s, const std::string& key) {
  return std::make_shared<const Vocabulary>(Vocabulary::load(require(s, key)));
}

}  // namespace

int cmd_vocab(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  cfg.validate();
  const auto& out = require(s, "out");
  auto sentences = load_sentences(require(s, "corpus"));
  std::size_t empty = 0;
  std::vector<Sentence> kept;
  for (auto& sent : sentences) {
    if (sent.empty())
      ++empty;
    else
      kept.push_back(std::move(sent));
  }
  if (empty) std::cerr << "warning: dropped " << empty << " empty lines\n";
  auto vocab = build_vocab(kept, cfg.threshold, lookup(s, "lang").value_or(""));
  vocab.save(out);
  write_manifest(out, s, cfg, start, {out});
  std::cout << "vocab: " << vocab.size() - kNumReserved << " tokens (+" << kNumReserved
            << " reserved), threshold=" << cfg.threshold << "\n";
  return 0;
}

int cmd_lexicon_train(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  cfg.lexicon_kind = "auto";
  cfg.validate();
  const auto& out = require(s, "out");
  auto sv = load_vocab(s, "src-vocab");
  auto tv = load_vocab(s, "trg-vocab");
  auto corpus = ParallelCorpus::load(require(s, "src"), require(s, "trg"));
  if (corpus.dropped_empty) std::cerr << "warning: dropped " << corpus.dropped_empty << " empty pairs\n";
  const auto pairs = encode_corpus(corpus, *sv, *tv);
  Ibm1Options opts;
  opts.iterations = cfg.ibm_iterations;
  opts.null_word = flag(s, "null-word");
  auto result = train_ibm1(pairs, sv, tv, opts);
  result.lexicon.save(out);
  write_manifest(out, s, cfg, start, {out});
  const auto covered = result.lexicon.covered_sources().size();
  std::cout << "lexicon-train: " << covered << "/" << sv->size() - kNumReserved
            << " source words covered, log-likelihood " << result.log_likelihood.back() << "\n";
  return 0;
}

int cmd_lexicon_merge(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  const auto& out = require(s, "out");
  auto sv = load_vocab(s, "src-vocab");
  auto tv = load_vocab(s, "trg-vocab");
  std::size_t skipped = 0;
  auto manual = load_manual(read_dictionary(require(s, "manual")), sv, tv, &skipped);
  if (skipped) std::cerr << "warning: skipped " << skipped << " dictionary entries with unknown source words\n";
  if (auto auto_path = lookup(s, "auto")) {
    cfg.lexicon_kind = "hybrid";
    hybrid(Lexicon::load(*auto_path, sv, tv), manual).save(out);
  } else {
    cfg.lexicon_kind = "manual";
    manual.save(out);
  }
  cfg.validate();
  write_manifest(out, s, cfg, start, {out});
  std::cout << "lexicon-merge: wrote " << cfg.lexicon_kind << " lexicon\n";
  return 0;
}

int cmd_train(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  auto sv = load_vocab(s, "src-vocab");
  auto tv = load_vocab(s, "trg-vocab");
  std::optional<Lexicon> lexicon;
  if (auto path = lookup(s, "lexicon")) {
    lexicon = Lexicon::load(*path, sv, tv);
    cfg.lexicon_kind = to_string(lexicon->kind());
  }
  cfg.validate();
  const auto& out = require(s, "out");

  auto corpus = ParallelCorpus::load(require(s, "src"), require(s, "trg"));
  if (corpus.dropped_empty) std::cerr << "warning: dropped " << corpus.dropped_empty << " empty pairs\n";
  const auto train_pairs = encode_corpus(corpus, *sv, *tv);
  std::vector<EncodedPair> dev_pairs;
  if (auto dev_src = lookup(s, "dev-src")) {
    auto dev = ParallelCorpus::load(*dev_src, require(s, "dev-trg"));
    dev_pairs = encode_corpus(dev, *sv, *tv);
  }

  ModelConfig mc;
  mc.layers = cfg.layers;
  mc.hidden = cfg.hidden;
  mc.embed = cfg.embed;
  mc.source_vocab = sv->size();
  mc.target_vocab = tv->size();
  mc.mode = cfg.mode;
  mc.epsilon = cfg.epsilon;
  mc.dropout = cfg.dropout;
  Model model(mc, cfg.seed);

  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batching.batch_size = cfg.batch_size;
  tc.batching.max_len = cfg.max_len;
  tc.batching.seed = cfg.seed;
  tc.adam.learning_rate = cfg.learning_rate;
  TrainData data{train_pairs, dev_pairs, lexicon ? &*lexicon : nullptr};
  auto curve = train(model, data, tc, [](const EpochMetrics& m, const Model&) {
    std::fprintf(stderr, "epoch %d  train_loss %.4f  dev_loss %.4f  dev_bleu %.2f\n", m.epoch,
                 m.train_loss, m.dev_loss, m.dev_bleu);
    return true;
  });

  model.save(out);
  std::vector<std::string> outputs{out};
  if (auto curve_out = lookup(s, "curve-out")) {
    write_text_atomic(*curve_out, format_curve(curve));
    outputs.push_back(*curve_out);
  }
  write_manifest(out, s, cfg, start, outputs);
  return 0;
}

int cmd_translate(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  const auto& out = require(s, "out");
  const auto model = Model::load(require(s, "model"));
  cfg.mode = model.mode();
  auto sv = load_vocab(s, "src-vocab");
  auto tv = load_vocab(s, "trg-vocab");
  if (sv->size() != model.config().source_vocab || tv->size() != model.config().target_vocab)
    throw Error("vocabulary sizes do not match the model (" + std::to_string(sv->size()) + "/" +
                std::to_string(tv->size()) + " vs " + std::to_string(model.config().source_vocab) +
                "/" + std::to_string(model.config().target_vocab) + ")");

  std::optional<Lexicon> lexicon, replace;
  if (auto path = lookup(s, "lexicon")) {
    lexicon = Lexicon::load(*path, sv, tv);
    cfg.lexicon_kind = to_string(lexicon->kind());
  }
  cfg.validate();
  if (auto path = lookup(s, "replace-lexicon"))
    replace = Lexicon::load(*path, sv, tv);
  else if (lexicon)
    replace = lexicon;
  const bool do_replace = !flag(s, "no-unk-replace");

  BeamOptions beam;
  beam.beam = cfg.beam;
  beam.eos_discount = cfg.eos_discount;
  if (auto v = lookup(s, "max-output-len")) beam.max_len = to_int("max-output-len", *v);
  int threads = 1;
  if (auto v = lookup(s, "threads")) threads = std::max(1, to_int("threads", *v));

  const auto inputs = load_sentences(require(s, "input"));
  std::vector<Translation> results(inputs.size());
  std::vector<std::string> errors(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      try {
        if (inputs[i].empty()) continue;
        const auto ids = sv->encode_source(inputs[i]);
        std::optional<LexiconMatrix> L;
        if (model.config().uses_lexicon()) L = build_matrix(*lexicon, ids);
        auto hyps = beam_search(model, L ? &*L : nullptr, ids, beam);
        const auto& best = hyps.front();
        if (do_replace) {
          results[i] = replace_unknowns(best, inputs[i], replace ? &*replace : nullptr, *tv);
        } else {
          results[i].tokens = tv->decode(best.tokens);
          results[i].score = best.score;
          results[i].attention = best.attention;
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (!errors[i].empty()) throw Error("sentence " + std::to_string(i + 1) + ": " + errors[i]);

  write_atomic(out, [&](std::ostream& os) {
    for (const auto& r : results) os << join_tokens(r.tokens) << '\n';
  });
  std::vector<std::string> outputs{out};
  if (auto path = lookup(s, "attention-out")) {
    write_atomic(*path, [&](std::ostream& os) {
      char buf[32];
      for (std::size_t i = 0; i < results.size(); ++i)
        for (std::size_t t = 0; t < results[i].attention.size(); ++t) {
          os << i << '\t' << t << '\t';
          const auto& a = results[i].attention[t];
          for (Eigen::Index j = 0; j < a.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(j));
            os << (j ? " " : "") << buf;
          }
          os << '\n';
        }
    });
    outputs.push_back(*path);
  }
  if (auto path = lookup(s, "unk-out")) {
    write_atomic(*path, [&](std::ostream& os) {
      for (std::size_t i = 0; i < results.size(); ++i)
        for (const auto& r : results[i].replacements)
          os << json{{"sentence", i},
                     {"position", r.position},
                     {"source_position", r.source_position},
                     {"source_token", r.source_token},
                     {"replacement", r.replacement},
                     {"copied", r.copied}}
                    .dump()
             << '\n';
    });
    outputs.push_back(*path);
  }
  write_manifest(out, s, cfg, start, outputs);
  return 0;
}

namespace {

std::vector<Vec> read_attention(const std::string& path) {
  std::vector<Vec> out;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab2 = lines[i].find('\t', lines[i].find('\t') + 1);
    if (tab2 == std::string::npos)
      throw Error(path + ": malformed attention line " + std::to_string(i + 1));
    const auto values = split_tokens(lines[i].substr(tab2 + 1));
    Vec a(static_cast<Eigen::Index>(values.size()));
    for (std::size_t j = 0; j < values.size(); ++j) a(static_cast<Eigen::Index>(j)) = to_double("attention", values[j]);
    out.push_back(std::move(a));
  }
  return out;
}

std::string fmt(double v, const char* f = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

int cmd_evaluate(const Settings& s) {
  const auto start = Clock::now();
  auto cfg = run_config(s);
  cfg.validate();
  const auto hyps = load_sentences(require(s, "hyp"));
  const auto refs = load_sentences(require(s, "ref"));
  const bool smooth = flag(s, "smooth");
  const auto system = lookup(s, "system").value_or("system");

  json report = json::object();
  report["system"] = system;
  const auto b = bleu4(hyps, refs, smooth);
  report["bleu"] = {{"metric", "bleu4"},
                    {"score", b.score},
                    {"precisions", b.precisions},
                    {"brevity_penalty", b.brevity_penalty},
                    {"hyp_len", b.hyp_len},
                    {"ref_len", b.ref_len},
                    {"config", {{"order", 4}, {"smooth", smooth}}}};
  const auto n = nist(hyps, refs);
  report["nist"] = {{"metric", "nist"},
                    {"score", n.score},
                    {"per_order", n.per_order},
                    {"brevity_factor", n.brevity_factor},
                    {"config", {{"order", 5}}}};
  std::string recall_cell = "-", entropy_cell = "-";
  if (auto train_trg = lookup(s, "train-trg")) {
    int threshold = 8;
    if (auto v = lookup(s, "rare-threshold")) threshold = to_int("rare-threshold", *v);
    auto scope = RareWordScope::either;
    if (auto v = lookup(s, "rare-scope")) {
      if (*v == "training")
        scope = RareWordScope::training_only;
      else if (*v != "either")
        throw Error("--rare-scope must be either|training");
    }
    const auto r = rare_word_recall(hyps, refs, load_sentences(*train_trg), threshold, scope);
    report["recall"] = {{"metric", "rare_word_recall"},
                        {"score", r.recall},
                        {"recovered", r.recovered},
                        {"total", r.total},
                        {"config", {{"threshold", threshold},
                                    {"scope", scope == RareWordScope::either ? "either" : "training"}}}};
    recall_cell = fmt(r.recall);
  }
  if (auto path = lookup(s, "attention")) {
    const auto vectors = read_attention(*path);
    const double h = attention_entropy(vectors);
    report["attention_entropy"] = {{"metric", "attention_entropy"},
                                   {"score", h},
                                   {"vectors", vectors.size()},
                                   {"config", {{"unit", "bits"}}}};
    entropy_cell = fmt(h);
  }
  if (auto other = lookup(s, "compare")) {
    int iterations = 10000;
    if (auto v = lookup(s, "bootstrap-iterations")) iterations = to_int("bootstrap-iterations", *v);
    const auto bs = paired_bootstrap(hyps, load_sentences(*other), refs, iterations, cfg.seed);
    report["bootstrap"] = {{"metric", "paired_bootstrap_bleu"},
                           {"iterations", bs.iterations},
                           {"bleu_a", bs.bleu_a},
                           {"bleu_b", bs.bleu_b},
                           {"wins_a", bs.wins_a},
                           {"wins_b", bs.wins_b},
                           {"ties", bs.ties},
                           {"p_a_better", bs.p_a_better},
                           {"p_b_better", bs.p_b_better},
                           {"a_better_p05", bs.a_better_at(0.05)},
                           {"a_better_p10", bs.a_better_at(0.10)},
                           {"b_better_p05", bs.b_better_at(0.05)},
                           {"b_better_p10", bs.b_better_at(0.10)},
                           {"config", {{"seed", cfg.seed}}}};
  }

  const std::string row = system + "\t" + fmt(b.score) + "\t" + fmt(n.score) + "\t" + recall_cell +
                          "\t" + entropy_cell + "\n";
  std::cout << "bleu=" << fmt(b.score) << " nist=" << fmt(n.score) << " recall=" << recall_cell
            << " attn_entropy=" << entropy_cell << "\n";
  if (report.contains("bootstrap"))
    std::cout << "bootstrap p(a better)=" << fmt(report["bootstrap"]["p_a_better"].get<double>())
              << " p(b better)=" << fmt(report["bootstrap"]["p_b_better"].get<double>()) << "\n";

  std::vector<std::string> outputs;
  if (auto path = lookup(s, "json-out")) {
    write_text_atomic(*path, report.dump(2) + "\n");
    outputs.push_back(*path);
  }
  if (auto path = lookup(s, "out")) {
    write_text_atomic(*path, "system\tbleu\tnist\trecall\tattn_entropy\n" + row);
    outputs.push_back(*path);
  }
  if (!outputs.empty()) write_manifest(outputs.front(), s, cfg, start, outputs);
  return 0;
}

}  // namespace lexnmt::cli
