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
#include <vector>

namespace lexnmt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

Vec softmax(const Vec& logits);
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// One LSTM layer without peepholes. W is 4h x (in + h) acting on [x; h_prev];
// gate blocks are ordered input, forget, output, candidate.
struct LstmWeights {
  Mat W;
  Mat b;  // 4h x 1

  int input_size() const { return static_cast<int>(W.cols() - W.rows() / 4); }
  int hidden_size() const { return static_cast<int>(W.rows() / 4); }
};

struct LstmState {
  Vec h;
  Vec c;
};

struct LstmStepCache {
  Vec x, h_prev, c_prev;
  Vec i, f, o, g;
  Vec tanh_c;
};

LstmState lstm_step(const LstmWeights& w, const Vec& x, const LstmState& prev,
                    LstmStepCache* cache = nullptr);

// Runs the layer over the columns of `inputs` (right to left when `reverse`).
// Column t of the result is the hidden state after reading input column t.
// caches[t] is indexed by column, not by processing order.
Mat lstm_forward(const LstmWeights& w, const Mat& inputs, bool reverse,
                 std::vector<LstmStepCache>* caches = nullptr,
                 LstmState* final_state = nullptr);

// Backpropagation through time. `d_outputs` holds dLoss/dh for each column;
// gradients are accumulated into `grad`; returns dLoss/dinputs.
Mat lstm_backward(const LstmWeights& w, const std::vector<LstmStepCache>& caches,
                  const Mat& d_outputs, bool reverse, LstmWeights& grad);

}  // namespace lexnmt
