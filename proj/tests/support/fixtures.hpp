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

#include <random>
#include <vector>

#include "lexnmt/corpus.hpp"
#include "lexnmt/lexicon.hpp"
#include "lexnmt/model.hpp"

namespace testing {

inline std::vector<int> random_ids(std::mt19937_64& rng, int length, int vocab, int first = 0) {
  std::uniform_int_distribution<int> pick(first, vocab - 1);
  std::vector<int> out(static_cast<std::size_t>(length));
  for (auto& x : out) x = pick(rng);
  return out;
}

// Random column-stochastic |V_e| x |F| matrix with roughly half the entries zero.
inline lexnmt::LexiconMatrix random_lexicon_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int j = 0; j < cols; ++j) {
    std::vector<double> col(static_cast<std::size_t>(rows), 0.0);
    double total = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (u(rng) < 0.5) continue;
      col[static_cast<std::size_t>(i)] = u(rng) + 0.05;
      total += col[static_cast<std::size_t>(i)];
    }
    if (total == 0.0) {
      col[lexnmt::kUnk] = 1.0;
      total = 1.0;
    }
    for (int i = 0; i < rows; ++i)
      if (col[static_cast<std::size_t>(i)] > 0.0)
        triplets.emplace_back(i, j, col[static_cast<std::size_t>(i)] / total);
  }
  lexnmt::LexiconMatrix::Sparse m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return lexnmt::LexiconMatrix(std::move(m));
}

inline lexnmt::ModelConfig small_config(lexnmt::Mode mode, int layers = 2, int hidden = 16,
                                        int vocab = 32) {
  lexnmt::ModelConfig c;
  c.layers = layers;
  c.hidden = hidden;
  c.embed = hidden;
  c.source_vocab = vocab;
  c.target_vocab = vocab;
  c.mode = mode;
  c.dropout = 0.0;
  return c;
}

// All tensors, interp and biases included, drawn from U(-0.5 scale, 0.5 scale).
inline lexnmt::Model random_model(const lexnmt::ModelConfig& config, std::uint64_t seed,
                                  double scale = 1.0) {
  lexnmt::Model model(config, seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  model.params().for_each(lexnmt::Mode::linear, [&](const std::string&, lexnmt::Mat& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = scale * u(rng) * 5.0;
  });
  return model;
}

}  // namespace testing
