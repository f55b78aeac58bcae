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


#include "lexnmt/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "lexnmt/decode.hpp"
#include "lexnmt/eval.hpp"
#include "lexnmt/io.hpp"

namespace lexnmt {

namespace {

std::optional<LexiconMatrix> matrix_for(const Model& model, const Lexicon* lexicon,
                                        std::span<const int> source) {
  if (!model.config().uses_lexicon()) return std::nullopt;
  return build_matrix(*lexicon, source);
}

Sentence as_sentence(std::span<const int> ids) {
  Sentence out;
  for (int id : ids) {
    if (id == kEos) break;
    out.push_back(std::to_string(id));
  }
  return out;
}

}  // namespace

double corpus_loss(const Model& model, std::span<const EncodedPair> pairs, const Lexicon* lexicon) {
  double loss = 0.0;
  long tokens = 0;
  for (const auto& p : pairs) {
    auto L = matrix_for(model, lexicon, p.source);
    loss += accumulate_sentence_loss(model, L ? &*L : nullptr, p.source, p.target, {}, nullptr);
    tokens += static_cast<long>(p.target.size());
  }
  return tokens ? loss / static_cast<double>(tokens) : std::numeric_limits<double>::quiet_NaN();
}

std::vector<EpochMetrics> train(Model& model, const TrainData& data, const TrainConfig& config,
                                const EpochCallback& on_epoch) {
  if (config.epochs < 1) throw Error("training needs at least one epoch");
  if (model.config().uses_lexicon() && !data.lexicon)
    throw Error(to_string(model.mode()) + " mode requires a lexicon");

  Adam adam(model.config(), config.adam);
  auto grad = Parameters::zeros(model.config());
  std::vector<EpochMetrics> log;
  const auto start = std::chrono::steady_clock::now();

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = make_batches(data.train, config.batching, epoch);
    double loss_sum = 0.0;
    long tokens = 0;
    for (const auto& batch : batches) {
      grad.set_zero();
      for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto src = batch.source_row(i);
        const auto trg = batch.target_row(i);
        auto L = matrix_for(model, data.lexicon, src);
        LossOptions opts;
        opts.training = true;
        opts.dropout_seed = mix_seed(config.batching.seed,
                                     (static_cast<std::uint64_t>(epoch) << 32) + batch.indices[i]);
        loss_sum += accumulate_sentence_loss(model, L ? &*L : nullptr, src, trg, opts, &grad);
        tokens += static_cast<long>(trg.size());
      }
      grad *= 1.0 / static_cast<double>(batch.size());
      adam.update(model.params(), grad, model.mode());
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(tokens);
    m.dev_loss = std::numeric_limits<double>::quiet_NaN();
    if (!data.dev.empty()) {
      m.dev_loss = corpus_loss(model, data.dev, data.lexicon);
      if (config.dev_bleu) {
        std::vector<Sentence> hyps, refs;
        for (const auto& p : data.dev) {
          auto L = matrix_for(model, data.lexicon, p.source);
          hyps.push_back(as_sentence(greedy_decode(model, L ? &*L : nullptr, p.source).tokens));
          refs.push_back(as_sentence(p.target));
        }
        m.dev_bleu = bleu4(hyps, refs).score;
      }
    }
    m.wallclock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.push_back(m);
    if (on_epoch && !on_epoch(m, model)) break;
  }
  return log;
}

std::string format_curve(const std::vector<EpochMetrics>& rows) {
  std::string out = "epoch\ttrain_loss\tdev_loss\tdev_bleu\twallclock_seconds\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.6f\t%.4f\t%.3f\n", r.epoch, r.train_loss, r.dev_loss,
                  r.dev_bleu, r.wallclock_seconds);
    out += buf;
  }
  return out;
}

}  // namespace lexnmt
