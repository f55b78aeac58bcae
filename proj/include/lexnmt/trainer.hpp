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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lexnmt/adam.hpp"
#include "lexnmt/corpus.hpp"
#include "lexnmt/lexicon.hpp"
#include "lexnmt/model.hpp"

namespace lexnmt {

struct TrainConfig {
  int epochs = 14;
  BatchOptions batching;  // batching.seed also drives dropout masks
  AdamConfig adam;
  bool dev_bleu = true;  // greedy-decode the dev set after every epoch
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;  // NLL per target token
  double dev_loss = 0.0;    // NLL per target token, NaN without a dev set
  double dev_bleu = 0.0;
  double wallclock_seconds = 0.0;
};

struct TrainData {
  std::span<const EncodedPair> train;
  std::span<const EncodedPair> dev;
  const Lexicon* lexicon = nullptr;  // required in bias and linear mode
};

// Called after every epoch; returning false stops training early.
using EpochCallback = std::function<bool(const EpochMetrics&, const Model&)>;

std::vector<EpochMetrics> train(Model& model, const TrainData& data, const TrainConfig& config,
                                const EpochCallback& on_epoch = {});

// Forward-only NLL per token over a set of pairs.
double corpus_loss(const Model& model, std::span<const EncodedPair> pairs, const Lexicon* lexicon);

// `epoch \t train_loss \t dev_loss \t dev_bleu \t wallclock_seconds`
std::string format_curve(const std::vector<EpochMetrics>& rows);

}  // namespace lexnmt
