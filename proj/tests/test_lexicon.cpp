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


#include <doctest.h>

#include <cmath>
#include <random>

#include "em_oracle.hpp"
#include "fixtures.hpp"
#include "lexnmt/io.hpp"
#include "lexnmt/lexicon.hpp"
#include "temp_dir.hpp"

using namespace lexnmt;

namespace {

using VocabPtr = std::shared_ptr<const Vocabulary>;

VocabPtr vocab(std::initializer_list<const char*> words) {
  Sentence s(words.begin(), words.end());
  std::vector<Sentence> one{s};
  return std::make_shared<const Vocabulary>(Vocabulary::build(one, 1));
}

double sum(const LexDistribution& d) {
  double s = 0.0;
  for (const auto& e : d) s += e.prob;
  return s;
}

struct Toy {
  VocabPtr vf = vocab({"a", "b"});
  VocabPtr ve = vocab({"x", "y"});
  std::vector<EncodedPair> pairs;
  Toy() {
    ParallelCorpus c = ParallelCorpus::from_lines(std::vector<std::string>{"a b", "b"},
                                                  std::vector<std::string>{"x y", "y"});
    pairs = encode_corpus(c, *vf, *ve);
  }
};

}  // namespace

TEST_CASE("single candidate gets all the mass") {
  auto vf = vocab({"a"});
  auto ve = vocab({"x"});
  std::vector<EncodedPair> pairs{{{vf->id("a")}, {ve->id("x"), kEos}}};
  for (int it : {1, 3}) {
    auto r = train_ibm1(pairs, vf, ve, {it, false, 1e-7});
    CHECK(r.lexicon.probability(vf->id("a"), ve->id("x")) == doctest::Approx(1.0));
    CHECK(r.log_likelihood.size() == static_cast<std::size_t>(it + 1));
  }
}

TEST_CASE("two-pair corpus converges to the obvious alignment") {
  Toy t;
  const int a = t.vf->id("a"), b = t.vf->id("b"), x = t.ve->id("x"), y = t.ve->id("y");
  // Convergence is sublinear: after 10 iterations p(x|a) is still 0.929.
  auto ten = train_ibm1(t.pairs, t.vf, t.ve, {10, false, 1e-7}).lexicon;
  CHECK(ten.probability(a, x) == doctest::Approx(0.929000).epsilon(1e-6));
  CHECK(ten.probability(b, y) == doctest::Approx(0.997035).epsilon(1e-6));
  auto many = train_ibm1(t.pairs, t.vf, t.ve, {600, false, 1e-7}).lexicon;
  CHECK(many.probability(a, x) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(many.probability(b, y) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(many.best_target(a) == x);
}

TEST_CASE("IBM1 matches the brute-force alignment oracle") {
  Toy t;
  std::vector<testing::BruteForceEm::Pair> raw;
  for (const auto& p : t.pairs)
    raw.emplace_back(p.source, std::vector<int>(p.target.begin(), p.target.end() - 1));
  testing::BruteForceEm oracle(raw);
  Ibm1Model model(t.pairs, t.vf->size(), false);
  for (int it = 0; it < 5; ++it) {
    CHECK(model.iterate() == doctest::Approx(oracle.iterate()).epsilon(1e-9));
    for (const auto& [key, p] : oracle.table())
      CHECK(std::abs(model.probability(key.first, key.second) - p) <= 1e-6);
  }
}

TEST_CASE("IBM1 matches the oracle on random corpora, also with NULL") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const bool null_word = trial % 2 == 1;
    std::uniform_int_distribution<int> len(1, 3);
    std::vector<EncodedPair> pairs;
    std::vector<testing::BruteForceEm::Pair> raw;
    const int nf = 6;
    for (int i = 0; i < 4; ++i) {
      EncodedPair p;
      p.source = testing::random_ids(rng, len(rng), nf, 3);
      p.target = testing::random_ids(rng, len(rng), 6, 3);
      auto src = p.source;
      if (null_word) src.push_back(nf);
      raw.emplace_back(src, p.target);
      pairs.push_back(p);
    }
    testing::BruteForceEm oracle(raw);
    Ibm1Model model(pairs, nf, null_word);
    for (int it = 0; it < 5; ++it) {
      CHECK(std::abs(model.iterate() - oracle.iterate()) <= 1e-9);
      for (const auto& [key, p] : oracle.table())
        CHECK(std::abs(model.probability(key.first, key.second) - p) <= 1e-6);
    }
  }
}

TEST_CASE("EM log-likelihood never decreases") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<EncodedPair> pairs;
    std::uniform_int_distribution<int> len(1, 6);
    for (int i = 0; i < 15; ++i)
      pairs.push_back({testing::random_ids(rng, len(rng), 12, 3), testing::random_ids(rng, len(rng), 12, 3)});
    Ibm1Model model(pairs, 12, trial % 2 == 0);
    double prev = model.iterate();
    for (int it = 0; it < 10; ++it) {
      const double next = model.iterate();
      CHECK(next - prev >= -1e-9);
      prev = next;
    }
  }
}

TEST_CASE("IBM1 rejects degenerate input") {
  std::vector<EncodedPair> none;
  CHECK_THROWS_AS(Ibm1Model(none, 5, false), Error);
  std::vector<EncodedPair> empty_target{{{3}, {kEos}}};
  CHECK_THROWS_AS(Ibm1Model(empty_target, 5, false), Error);
  Toy t;
  CHECK_THROWS_AS(train_ibm1(t.pairs, t.vf, t.ve, {0, false, 1e-7}), Error);
}

TEST_CASE("auto lexicon is stochastic and reports coverage") {
  Toy t;
  auto lex = train_ibm1(t.pairs, t.vf, t.ve, {5, true, 1e-7}).lexicon;
  CHECK(lex.kind() == LexiconKind::automatic);
  for (int f : lex.sources()) CHECK(sum(lex.query(f)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lex.covered(t.vf->id("a")));
  CHECK_FALSE(lex.covered(kUnk));
  CHECK(lex.query(kUnk) == LexDistribution{{kUnk, 1.0}});
}

TEST_CASE("manual lexicon is uniform over known translations") {
  auto vf = vocab({"f1", "f2", "f3"});
  auto ve = vocab({"e1", "e2", "e3", "e4"});
  std::vector<DictionaryEntry> dict{{"f1", "e1"}, {"f1", "e2"},   {"f2", "gone"}, {"f3", "e1"},
                                    {"f3", "e2"}, {"f3", "e3"},   {"f3", "e4"},   {"f1", "e1"},
                                    {"nope", "e1"}};
  std::size_t skipped = 0;
  auto lex = load_manual(dict, vf, ve, &skipped);
  CHECK(skipped == 1);
  CHECK(lex.kind() == LexiconKind::manual);
  CHECK(lex.probability(vf->id("f1"), ve->id("e1")) == 0.5);
  CHECK(lex.probability(vf->id("f1"), ve->id("e2")) == 0.5);
  CHECK(lex.probability(vf->id("f2"), kUnk) == 1.0);
  CHECK_FALSE(lex.covered(vf->id("f2")));
  for (const char* e : {"e1", "e2", "e3", "e4"}) CHECK(lex.probability(vf->id("f3"), ve->id(e)) == 0.25);
  CHECK_THROWS_AS(load_manual(std::vector<DictionaryEntry>{}, vf, ve), Error);
}

TEST_CASE("allocate_unk gives unk the remainder") {
  auto vf = vocab({"a", "b", "c"});
  auto ve = vocab({"x", "y"});
  Lexicon lex(LexiconKind::manual, vf, ve);
  lex.set(vf->id("a"), {{ve->id("x"), 0.5}, {ve->id("y"), 0.3}});
  lex.set(vf->id("b"), {{ve->id("x"), 1.0}});
  lex.set(vf->id("c"), {{kUnk, 1.0}});
  auto out = allocate_unk(lex);
  CHECK(out.probability(vf->id("a"), kUnk) == doctest::Approx(0.2));
  CHECK(out.probability(vf->id("b"), kUnk) == 0.0);
  CHECK(out.probability(vf->id("c"), kUnk) == 1.0);
  Lexicon bad(LexiconKind::manual, vf, ve);
  bad.set(vf->id("a"), {{ve->id("x"), 0.9}, {ve->id("y"), 0.2}});
  CHECK_THROWS_AS(allocate_unk(bad), Error);
}

TEST_CASE("hybrid falls back to the manual lexicon") {
  auto vf = vocab({"a", "b", "c", "d"});
  auto ve = vocab({"x", "y", "z"});
  Lexicon autolex(LexiconKind::automatic, vf, ve);
  autolex.set(vf->id("a"), {{ve->id("x"), 0.7}, {kUnk, 0.3}});
  autolex.set(vf->id("c"), {{kUnk, 1.0}});
  Lexicon manual(LexiconKind::manual, vf, ve);
  manual.set(vf->id("a"), {{ve->id("y"), 1.0}});
  manual.set(vf->id("b"), {{ve->id("z"), 0.5}, {ve->id("y"), 0.5}});
  manual.set(vf->id("c"), {{ve->id("z"), 1.0}});
  auto h = hybrid(autolex, manual);
  CHECK(h.kind() == LexiconKind::hybrid);
  CHECK(h.query(vf->id("a")) == autolex.query(vf->id("a")));
  CHECK(h.query(vf->id("b")) == manual.query(vf->id("b")));
  CHECK(h.query(vf->id("c")) == manual.query(vf->id("c")));
  CHECK_FALSE(h.covered(vf->id("d")));
  CHECK(h.query(vf->id("d")) == LexDistribution{{kUnk, 1.0}});
  Lexicon other(LexiconKind::manual, vocab({"q"}), ve);
  CHECK_THROWS_AS(hybrid(autolex, other), Error);
}

TEST_CASE("best target ignores unk and breaks ties by id") {
  auto vf = vocab({"a"});
  auto ve = vocab({"x", "y"});
  Lexicon lex(LexiconKind::manual, vf, ve);
  lex.set(vf->id("a"), {{kUnk, 0.5}, {ve->id("y"), 0.25}, {ve->id("x"), 0.25}});
  CHECK(lex.best_target(vf->id("a")) == std::min(ve->id("x"), ve->id("y")));
  CHECK(lex.best_target(kUnk) == -1);
}

TEST_CASE("lexicon file round trip") {
  testing::TempDir dir;
  Toy t;
  auto lex = train_ibm1(t.pairs, t.vf, t.ve, {3, false, 1e-7}).lexicon;
  lex.save(dir.file("lex.tsv"));
  const auto text = testing::slurp(dir.file("lex.tsv"));
  CHECK(text.rfind("#kind=auto\n", 0) == 0);
  auto back = Lexicon::load(dir.file("lex.tsv"), t.vf, t.ve);
  CHECK(back == lex);
  CHECK(back.serialize() == lex.serialize());

  dir.write("bad1.tsv", "a\tx\t0.5\n");
  CHECK_THROWS_AS(Lexicon::load(dir.file("bad1.tsv"), t.vf, t.ve), Error);
  dir.write("bad2.tsv", "#kind=manual\na\tx\t0.5\n");
  CHECK_THROWS_AS(Lexicon::load(dir.file("bad2.tsv"), t.vf, t.ve), Error);
  dir.write("bad3.tsv", "#kind=manual\nzz\tx\t1\n");
  CHECK_THROWS_AS(Lexicon::load(dir.file("bad3.tsv"), t.vf, t.ve), Error);
  dir.write("bad4.tsv", "#kind=manual\na\tx\n");
  CHECK_THROWS_AS(Lexicon::load(dir.file("bad4.tsv"), t.vf, t.ve), Error);
}

TEST_CASE("dictionary reader") {
  testing::TempDir dir;
  dir.write("d.tsv", "# comment\na\tx\n\nb\ty\n");
  auto d = read_dictionary(dir.file("d.tsv"));
  CHECK(d == std::vector<DictionaryEntry>{{"a", "x"}, {"b", "y"}});
  dir.write("bad.tsv", "a x\n");
  CHECK_THROWS_AS(read_dictionary(dir.file("bad.tsv")), Error);
}

TEST_CASE("lexicon matrix columns match queries") {
  auto vf = vocab({"a", "b", "c"});
  auto ve = vocab({"x", "y"});
  Lexicon lex(LexiconKind::manual, vf, ve);
  lex.set(vf->id("a"), {{ve->id("x"), 0.6}, {ve->id("y"), 0.4}});
  lex.set(vf->id("b"), {{ve->id("y"), 1.0}});
  std::vector<int> src{vf->id("a"), vf->id("c"), vf->id("b")};
  auto L = build_matrix(lex, src);
  CHECK(L.rows() == ve->size());
  CHECK(L.cols() == 3);
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(ve->size());
    for (const auto& e : lex.query(src[static_cast<std::size_t>(j)])) expected(e.target) = e.prob;
    CHECK(L.column(j) == expected);
    CHECK(L.column(j).sum() == doctest::Approx(1.0));
  }
  Eigen::VectorXd a = Eigen::VectorXd::Zero(3);
  a(2) = 1.0;
  CHECK(lexicon_predictive(L, a) == L.column(2));
  a << 0.9, 0.1, 0.0;
  auto p = lexicon_predictive(L, a);
  for (int i = 0; i < ve->size(); ++i)
    CHECK(p(i) == doctest::Approx(0.9 * L.column(0)(i) + 0.1 * L.column(1)(i)).epsilon(1e-15));
  CHECK_THROWS_AS(lexicon_predictive(L, Eigen::VectorXd::Ones(2) / 2), Error);
}

TEST_CASE("sparse predictive equals a dense multiply") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto L = testing::random_lexicon_matrix(rng, 9, 1 + trial % 6);
    Eigen::MatrixXd dense(L.matrix());
    Eigen::VectorXd a = Eigen::VectorXd::Random(L.cols()).cwiseAbs();
    a /= a.sum();
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < L.cols(); ++j) expected(i) += dense(i, j) * a(j);
    auto p = lexicon_predictive(L, a);
    CHECK((p - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.minCoeff() >= 0.0);
  }
}
