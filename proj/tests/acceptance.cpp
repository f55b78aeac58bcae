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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "em_oracle.hpp"
#include "exhaustive.hpp"
#include "fixtures.hpp"
#include "grad_check.hpp"
#include "lexnmt/decode.hpp"
#include "lexnmt/eval.hpp"
#include "lexnmt/io.hpp"
#include "lexnmt/lexicon.hpp"
#include "run_cli.hpp"
#include "toy_task.hpp"

using namespace lexnmt;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// --- 1 -----------------------------------------------------------------------

Outcome gradient_correctness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> len(1, 6);
  long checked = 0, failures = 0;
  double worst = 0.0, worst_significant = 0.0, worst_abs = 0.0;
  for (auto mode : {Mode::base, Mode::bias, Mode::linear}) {
    auto cfg = testing::small_config(mode, 2, 16, 32);
    auto model = testing::random_model(cfg, 77 + static_cast<int>(mode));
    auto src = testing::random_ids(rng, len(rng), 32);
    auto trg = testing::random_ids(rng, len(rng) - 1, 32);
    trg.push_back(kEos);
    auto L = testing::random_lexicon_matrix(rng, 32, static_cast<int>(src.size()));
    auto r = testing::grad_check(model, mode == Mode::base ? nullptr : &L, src, trg);
    checked += r.checked;
    failures += r.failures;
    worst = std::max(worst, r.worst_relative);
    worst_significant = std::max(worst_significant, r.worst_relative_significant);
    worst_abs = std::max(worst_abs, r.worst_absolute);
  }
  const double t = seconds_since(start);
  return {failures == 0 && t < 120.0,
          fmt("%.0f entries checked, %.0f failures, worst rel err %.2e above the 1e-8 floor",
              static_cast<double>(checked), static_cast<double>(failures), worst) +
              fmt(" (%.2e where |grad| >= 1e-6), worst abs err %.2e, %.1fs", worst_significant, worst_abs, t)};
}

// --- 2 -----------------------------------------------------------------------

Outcome em_oracle_equivalence() {
  const auto start = Clock::now();
  // {("a b" -> "x y"), ("b" -> "y")} with a=3, b=4, x=3, y=4.
  std::vector<EncodedPair> pairs{{{3, 4}, {3, 4, kEos}}, {{4}, {4, kEos}}};
  testing::BruteForceEm oracle({{{3, 4}, {3, 4}}, {{4}, {4}}});
  Ibm1Model model(pairs, 5, false);
  double max_dev = 0.0;
  for (int it = 0; it < 5; ++it) {
    max_dev = std::max(max_dev, std::abs(model.iterate() - oracle.iterate()));
    for (const auto& [key, p] : oracle.table())
      max_dev = std::max(max_dev, std::abs(model.probability(key.first, key.second) - p));
  }

  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(1, 7), size(2, 30);
  double worst_drop = 0.0;
  for (int c = 0; c < 50; ++c) {
    std::vector<EncodedPair> corpus;
    const int n = size(rng);
    for (int i = 0; i < n; ++i)
      corpus.push_back({testing::random_ids(rng, len(rng), 20, 3), testing::random_ids(rng, len(rng), 20, 3)});
    Ibm1Model m(corpus, 20, c % 2 == 1);
    double prev = m.iterate();
    for (int it = 0; it < 15; ++it) {
      const double next = m.iterate();
      worst_drop = std::max(worst_drop, prev - next);
      prev = next;
    }
  }
  const double t = seconds_since(start);
  return {max_dev <= 1e-6 && worst_drop <= 1e-9 && t < 60.0,
          fmt("oracle max deviation %.2e over 5 iterations; worst log-likelihood drop %.2e over 50 corpora; %.1fs",
              max_dev, worst_drop, t)};
}

// --- 3 -----------------------------------------------------------------------

Outcome lexicon_stochasticity() {
  auto corpus = testing::make_toy_corpus(1);
  // Source words whose translations are all singletons: in V_f, but every
  // co-occurring target is unk, so the automatic lexicon cannot cover them.
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < 3; ++i)
      corpus.train.push_back({{"orphan" + std::to_string(k)},
                              {"lone" + std::to_string(k) + "_" + std::to_string(i)}});
  auto s = testing::prepare_toy(corpus, 2, 10);
  const auto& vf = s.source_vocab;
  const auto& ve = s.target_vocab;
  std::vector<DictionaryEntry> dict;
  for (int k = 0; k < 5; ++k) dict.push_back({"orphan" + std::to_string(k), "t" + std::to_string(90 + k)});
  dict.push_back({"orphan0", "t1"});
  dict.push_back({"orphan1", "never-seen"});
  for (int k = 0; k < 8; ++k) dict.push_back({"s" + std::to_string(k), "t" + std::to_string(50 + k)});
  for (int k = 10; k < 14; ++k) dict.push_back({"s" + std::to_string(k), "t" + std::to_string(k)});
  dict.push_back({"not-in-vocab", "t2"});
  std::size_t skipped = 0;
  auto manual = load_manual(dict, vf, ve, &skipped);
  const auto& autolex = *s.lexicon;
  auto hyb = hybrid(autolex, manual);

  double worst = 0.0;
  long columns = 0;
  std::mt19937_64 rng(5);
  std::vector<std::vector<int>> sentences;
  for (const auto& p : s.train) sentences.push_back(p.source);
  for (const auto& p : s.heldout) sentences.push_back(p.source);
  for (int k = 0; k < 5; ++k) sentences.push_back({vf->id("orphan" + std::to_string(k)), vf->id("s1"), kUnk});
  for (const Lexicon* lex : {&autolex, static_cast<const Lexicon*>(&manual), static_cast<const Lexicon*>(&hyb)}) {
    for (const auto& src : sentences) {
      auto L = build_matrix(*lex, src);
      for (int j = 0; j < L.cols(); ++j) {
        worst = std::max(worst, std::abs(L.column(j).sum() - 1.0));
        ++columns;
      }
      Vec a = Vec::NullaryExpr(L.cols(), [&] { return std::uniform_real_distribution<double>(0, 1)(rng); });
      a /= a.sum();
      Vec p = lexicon_predictive(L, a);
      worst = std::max(worst, std::abs(p.sum() - 1.0));
      if (p.minCoeff() < 0.0) worst = 1.0;
    }
  }
  long auto_agree = 0, auto_total = 0, manual_agree = 0, manual_total = 0;
  for (int f = 0; f < vf->size(); ++f) {
    if (autolex.covered(f)) {
      ++auto_total;
      auto_agree += hyb.query(f) == autolex.query(f);
    } else if (manual.covered(f)) {
      ++manual_total;
      manual_agree += hyb.query(f) == manual.query(f);
    }
  }
  const bool pass = worst <= 1e-6 && auto_agree == auto_total && manual_agree == manual_total &&
                    manual_total > 0 && dict.size() == 20;
  return {pass, fmt("%.0f columns, max |sum-1| %.2e; hybrid==auto on %.0f covered sources, manual fallback on %.0f",
                    static_cast<double>(columns), worst, static_cast<double>(auto_total),
                    static_cast<double>(manual_total))};
}

// --- 4 -----------------------------------------------------------------------

Outcome bias_neutrality() {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> n(0.0, 3.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const int V = 5 + draw % 40, H = 3 + draw % 13;
    Mat W(V, H);
    Vec b(V), combined(H);
    for (Eigen::Index k = 0; k < W.size(); ++k) W.data()[k] = n(rng);
    for (Eigen::Index k = 0; k < V; ++k) b(k) = n(rng);
    for (Eigen::Index k = 0; k < H; ++k) combined(k) = n(rng);
    const Vec lex = Vec::Constant(V, draw % 2 ? 1.0 / V : u(rng));
    worst = std::max(worst, (predict_bias(W, b, combined, lex, 1e-3) - predict_base(W, b, combined)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, fmt("max componentwise difference %.2e over 100 draws", worst)};
}

// --- 5, 9 ----------------------------------------------------------------------

struct ConvergenceRuns {
  std::vector<testing::ToyRun> base, bias;
  std::vector<double> base_entropy, bias_entropy;
  double seconds = 0.0;
};

ConvergenceRuns& convergence_runs() {
  static ConvergenceRuns runs = [] {
    ConvergenceRuns r;
    const auto start = Clock::now();
    testing::ToyModelOptions opt;
    opt.dropout = 0.2;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto s = testing::prepare_toy(testing::make_toy_corpus(seed));
      for (auto mode : {Mode::base, Mode::bias}) {
        auto run = testing::train_toy(s, mode, seed, 30, 2.0, opt);
        std::vector<Vec> attention;
        testing::greedy_accuracy(*run.model, s, &attention);
        const double h = attention_entropy(attention);
        (mode == Mode::base ? r.base_entropy : r.bias_entropy).push_back(h);
        (mode == Mode::base ? r.base : r.bias).push_back(std::move(run));
      }
    }
    r.seconds = seconds_since(start);
    return r;
  }();
  return runs;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome convergence_speed() {
  auto& r = convergence_runs();
  std::vector<double> base90, bias90;
  bool reached = true;
  std::string per_seed;
  for (std::size_t i = 0; i < r.base.size(); ++i) {
    const int b90 = r.base[i].epochs_to(0.90), x90 = r.bias[i].epochs_to(0.90);
    reached = reached && b90 > 0 && x90 > 0 && r.base[i].epochs_to(0.95) > 0 && r.bias[i].epochs_to(0.95) > 0;
    base90.push_back(b90);
    bias90.push_back(x90);
    per_seed += " " + std::to_string(x90) + "/" + std::to_string(b90);
  }
  const double mb = mean(base90), mx = mean(bias90);
  return {reached && mx <= 0.5 * mb && r.seconds < 600.0,
          fmt("epochs to 90%%: bias %.2f vs base %.2f (ratio %.2f)", mx, mb, mx / mb) +
              (reached ? "; all runs reach 95% within 30 epochs" : "; some run misses 90% or 95%") +
              "; per seed bias/base:" + per_seed + fmt("; training %.0fs", r.seconds)};
}

Outcome attention_entropy_direction() {
  auto& r = convergence_runs();
  const double b = mean(r.base_entropy), x = mean(r.bias_entropy);
  return {x <= b, fmt("mean attention entropy: bias %.3f bits, base %.3f bits", x, b)};
}

// --- 6 -----------------------------------------------------------------------

Outcome accuracy_direction() {
  const auto start = Clock::now();
  testing::ToyModelOptions opt;
  opt.dropout = 0.2;
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    testing::ToyOptions to;
    to.noise = 0.1;
    auto s = testing::prepare_toy(testing::make_toy_corpus(seed, to), 2);
    auto base = testing::train_toy(s, Mode::base, seed, 5, 2.0, opt);
    auto bias = testing::train_toy(s, Mode::bias, seed, 5, 2.0, opt);
    const double bb = testing::beam_bleu(*base.model, s), xb = testing::beam_bleu(*bias.model, s);
    wins += xb > bb;
    detail += fmt(" seed %.0f: bias %.2f / base %.2f;", static_cast<double>(seed), xb, bb);
  }
  return {wins == 3, "BLEU at epoch 5," + detail + fmt(" %.0fs", seconds_since(start))};
}

// --- 7 -----------------------------------------------------------------------

Outcome metric_oracles() {
  const auto start = Clock::now();
  auto one = [](const char* s) { return std::vector<Sentence>{split_tokens(s)}; };
  const double bleu = bleu4(one("a b c d"), one("a b c d e")).score;
  const double n = nist(one("a b c"), one("a b c")).score;

  auto toy = testing::make_toy_corpus(3);
  std::vector<Sentence> refs, train, hyps;
  for (const auto& p : toy.heldout) refs.push_back(p.target);
  for (const auto& p : toy.train) train.push_back(p.target);
  const double identity_bleu = bleu4(refs, refs).score;
  const double identity_recall = rare_word_recall(refs, refs, train).recall;

  std::mt19937_64 rng(8);
  for (auto r : refs) {
    if (r.size() > 1 && rng() % 3 == 0) std::swap(r[0], r[1]);
    hyps.push_back(r);
  }
  int significant = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto b = paired_bootstrap(hyps, hyps, refs, 10000, seed);
    significant += b.a_better_at(0.10) || b.b_better_at(0.10);
  }
  const double t = seconds_since(start);
  const bool pass = std::abs(bleu - 77.88) <= 0.01 && std::abs(n - 1.585) <= 0.001 &&
                    std::abs(identity_bleu - 100.0) < 1e-9 && identity_recall == 100.0 &&
                    significant == 0 && t < 60.0;
  return {pass, fmt("BLEU %.4f, NIST %.4f, identity BLEU %.1f / recall %.1f", bleu, n, identity_bleu,
                    identity_recall) +
                    fmt(", self-bootstrap significant in %.0f/5 seeds; %.1fs", significant, t)};
}

// --- 8 -----------------------------------------------------------------------

Outcome decode_oracles() {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> len(1, 8);
  int greedy_agree = 0;
  double worst_rescore = 0.0;
  auto rescore = [&](const Model& m, const LexiconMatrix* L, const std::vector<int>& src,
                     const std::vector<Hypothesis>& hyps, double discount) {
    for (const auto& h : hyps)
      worst_rescore = std::max(worst_rescore, std::abs(h.score - score_sequence(m, L, src, h.tokens, discount)));
  };
  for (int i = 0; i < 100; ++i) {
    const auto mode = static_cast<Mode>(i % 3);
    auto model = testing::random_model(testing::small_config(mode, 2, 8, 20), 1000 + i, 3.0);
    auto src = testing::random_ids(rng, len(rng), 20, 3);
    auto L = testing::random_lexicon_matrix(rng, 20, static_cast<int>(src.size()));
    const LexiconMatrix* lex = mode == Mode::base ? nullptr : &L;
    auto beam = beam_search(model, lex, src, {1, 0.9, 0});
    auto greedy = greedy_decode(model, lex, src, 0.9);
    greedy_agree += beam.size() == 1 && beam[0].tokens == greedy.tokens &&
                    std::abs(beam[0].score - greedy.score) <= 1e-12;
    rescore(model, lex, src, beam, 0.9);
    rescore(model, lex, src, beam_search(model, lex, src, {5, 0.9, 0}), 0.9);
  }
  int exhaustive_agree = 0;
  for (int i = 0; i < 20; ++i) {
    const auto mode = static_cast<Mode>(i % 3);
    auto model = testing::random_model(testing::small_config(mode, 1, 6, 5), 2000 + i, 3.0);
    auto src = testing::random_ids(rng, 1 + i % 4, 5, 3);
    auto L = testing::random_lexicon_matrix(rng, 5, static_cast<int>(src.size()));
    const LexiconMatrix* lex = mode == Mode::base ? nullptr : &L;
    auto oracle = testing::exhaustive_search(model, lex, src, 4, 0.9);
    auto hyps = beam_search(model, lex, src, {64, 0.9, 4});
    exhaustive_agree += hyps.front().tokens == oracle.tokens &&
                        std::abs(hyps.front().score - oracle.score) <= 1e-9;
    rescore(model, lex, src, hyps, 0.9);
  }
  return {greedy_agree == 100 && exhaustive_agree == 20 && worst_rescore <= 1e-9,
          fmt("b=1 matches greedy %.0f/100; beam matches exhaustive %.0f/20; worst rescoring error %.2e",
              greedy_agree, exhaustive_agree, worst_rescore)};
}

// --- 10 ----------------------------------------------------------------------

std::string drop_last_column(const std::string& tsv) {
  std::istringstream in(tsv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind('\t')) + "\n";
  return out;
}

std::map<std::string, std::string> pipeline_run(const testing::TempDir& dir, std::string& error) {
  testing::write_toy_files(dir, 17, 200, 40);
  const std::vector<std::string> steps = {
      "vocab --corpus train.src --out src.vocab",
      "vocab --corpus train.trg --threshold 12 --out trg.vocab",
      "lexicon-train --src train.src --trg train.trg --src-vocab src.vocab --trg-vocab trg.vocab "
      "--iterations 5 --out auto.tsv",
      "lexicon-merge --auto auto.tsv --manual dict.tsv --src-vocab src.vocab --trg-vocab trg.vocab "
      "--out hybrid.tsv",
      "train --src train.src --trg train.trg --dev-src dev.src --dev-trg dev.trg --src-vocab src.vocab "
      "--trg-vocab trg.vocab --mode bias --lexicon hybrid.tsv --epochs 2 --layers 1 --hidden 16 "
      "--embed 16 --learning-rate 0.02 --seed 7 --out model.bin --curve-out curve.tsv",
      "translate --model model.bin --src-vocab src.vocab --trg-vocab trg.vocab --lexicon hybrid.tsv "
      "--input test.src --threads 3 --attention-out att.tsv --unk-out unk.jsonl --out hyp.txt",
      "evaluate --hyp hyp.txt --ref test.trg --train-trg train.trg --attention att.tsv "
      "--compare test.trg --bootstrap-iterations 500 --json-out report.json --out row.tsv",
  };
  for (const auto& step : steps) {
    auto r = testing::run_cli(dir, step);
    if (r.status != 0) {
      error = step.substr(0, step.find(' ')) + ": " + r.err;
      return {};
    }
  }
  std::map<std::string, std::string> artifacts;
  for (const char* f : {"src.vocab", "trg.vocab", "auto.tsv", "hybrid.tsv", "model.bin", "hyp.txt",
                        "att.tsv", "unk.jsonl", "report.json", "row.tsv"})
    artifacts[f] = testing::slurp(dir.file(f));
  // Only the wallclock column of the curve may differ between runs.
  artifacts["curve.tsv"] = drop_last_column(testing::slurp(dir.file("curve.tsv")));
  return artifacts;
}

Outcome determinism() {
  testing::TempDir a("lexnmt-run-a"), b("lexnmt-run-b");
  std::string err_a, err_b;
  auto ra = pipeline_run(a, err_a);
  auto rb = pipeline_run(b, err_b);
  if (!err_a.empty() || !err_b.empty()) return {false, "pipeline failed: " + err_a + err_b};
  int same = 0;
  std::string differing;
  for (const auto& [name, bytes] : ra) {
    if (rb[name] == bytes && !bytes.empty())
      ++same;
    else
      differing += " " + name;
  }
  return {same == static_cast<int>(ra.size()),
          fmt("%.0f/%.0f artifacts byte-identical", same, static_cast<double>(ra.size())) +
              (differing.empty() ? "" : "; differing:" + differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 gradient correctness", gradient_correctness},
      {"2 EM oracle equivalence", em_oracle_equivalence},
      {"3 lexicon stochasticity", lexicon_stochasticity},
      {"4 bias neutrality", bias_neutrality},
      {"5 convergence speed", convergence_speed},
      {"6 accuracy direction", accuracy_direction},
      {"7 metric oracles", metric_oracles},
      {"8 decode oracles", decode_oracles},
      {"9 attention entropy direction", attention_entropy_direction},
      {"10 determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
