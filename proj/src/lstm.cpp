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


#include "lexnmt/lstm.hpp"

#include <cmath>

namespace lexnmt {

Vec softmax(const Vec& logits) {
  const double max = logits.maxCoeff();
  Vec p = (logits.array() - max).exp().matrix();
  return p / p.sum();
}

LstmState lstm_step(const LstmWeights& w, const Vec& x, const LstmState& prev,
                    LstmStepCache* cache) {
  const auto H = w.hidden_size();
  const auto in = w.input_size();
  Vec z = w.W.leftCols(in) * x + w.W.rightCols(H) * prev.h + w.b.col(0);
  Vec i = z.segment(0, H).unaryExpr([](double v) { return sigmoid(v); });
  Vec f = z.segment(H, H).unaryExpr([](double v) { return sigmoid(v); });
  Vec o = z.segment(2 * H, H).unaryExpr([](double v) { return sigmoid(v); });
  Vec g = z.segment(3 * H, H).array().tanh().matrix();
  LstmState next;
  next.c = f.cwiseProduct(prev.c) + i.cwiseProduct(g);
  Vec tanh_c = next.c.array().tanh().matrix();
  next.h = o.cwiseProduct(tanh_c);
  if (cache) {
    cache->x = x;
    cache->h_prev = prev.h;
    cache->c_prev = prev.c;
    cache->i = std::move(i);
    cache->f = std::move(f);
    cache->o = std::move(o);
    cache->g = std::move(g);
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

Mat lstm_forward(const LstmWeights& w, const Mat& inputs, bool reverse,
                 std::vector<LstmStepCache>* caches, LstmState* final_state) {
  const auto H = w.hidden_size();
  const auto T = inputs.cols();
  Mat out(H, T);
  LstmState state{Vec::Zero(H), Vec::Zero(H)};
  if (caches) caches->assign(static_cast<std::size_t>(T), {});
  for (Eigen::Index k = 0; k < T; ++k) {
    const auto t = reverse ? T - 1 - k : k;
    state = lstm_step(w, inputs.col(t), state,
                      caches ? &(*caches)[static_cast<std::size_t>(t)] : nullptr);
    out.col(t) = state.h;
  }
  if (final_state) *final_state = state;
  return out;
}

Mat lstm_backward(const LstmWeights& w, const std::vector<LstmStepCache>& caches,
                  const Mat& d_outputs, bool reverse, LstmWeights& grad) {
  const auto H = w.hidden_size();
  const auto in = w.input_size();
  const auto T = d_outputs.cols();
  Mat d_inputs(in, T);
  Vec dh_next = Vec::Zero(H);
  Vec dc_next = Vec::Zero(H);
  Vec dz(4 * H);
  for (Eigen::Index k = 0; k < T; ++k) {
    // Walk opposite to the forward processing order.
    const auto t = reverse ? k : T - 1 - k;
    const auto& s = caches[static_cast<std::size_t>(t)];
    Vec dh = d_outputs.col(t) + dh_next;
    Vec dc = dc_next + dh.cwiseProduct(s.o).cwiseProduct(
                           (1.0 - s.tanh_c.array().square()).matrix());
    dz.segment(0, H) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
    dz.segment(H, H) =
        dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
    dz.segment(2 * H, H) =
        dh.cwiseProduct(s.tanh_c).cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
    dz.segment(3 * H, H) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());

    grad.W.leftCols(in).noalias() += dz * s.x.transpose();
    grad.W.rightCols(H).noalias() += dz * s.h_prev.transpose();
    grad.b.col(0) += dz;
    d_inputs.col(t).noalias() = w.W.leftCols(in).transpose() * dz;
    dh_next.noalias() = w.W.rightCols(H).transpose() * dz;
    dc_next = dc.cwiseProduct(s.f);
  }
  return d_inputs;
}

}  // namespace lexnmt
