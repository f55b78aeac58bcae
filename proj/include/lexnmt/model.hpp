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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lexnmt/lexicon.hpp"
#include "lexnmt/lstm.hpp"

namespace lexnmt {

// How the lexicon enters the output distribution.
//   base:   softmax(out_W combined + out_b)
//   bias:   softmax(out_W combined + out_b + log(p_lex + epsilon))
//   linear: lambda p_lex + (1 - lambda) p_model, lambda = sigmoid(interp)
enum class Mode { base, bias, linear };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

struct ModelConfig {
  int layers = 2;
  int hidden = 64;
  int embed = 64;
  int source_vocab = 0;
  int target_vocab = 0;
  Mode mode = Mode::base;
  double epsilon = 1e-3;
  double dropout = 0.2;

  void validate() const;
  bool uses_lexicon() const { return mode != Mode::base; }
};

struct Parameters {
  Mat source_embed;  // embed x |V_f|, one column per word
  Mat target_embed;  // embed x |V_e|
  std::vector<LstmWeights> encoder_fwd;
  std::vector<LstmWeights> encoder_bwd;
  std::vector<LstmWeights> decoder;
  Mat merge_W;  // hidden x 2*hidden, acts on [backward; forward]
  Mat merge_b;
  Mat combine_W;  // hidden x 2*hidden, acts on [decoder state; context]
  Mat combine_b;
  Mat out_W;  // |V_e| x hidden
  Mat out_b;
  Mat interp;  // 1 x 1 pre-sigmoid interpolation scalar; only a parameter in linear mode

  static Parameters zeros(const ModelConfig& config);

  // Visits every trainable tensor in a fixed order. `interp` is included only
  // in linear mode.
  template <class F>
  void for_each(Mode mode, F&& f) {
    visit(*this, mode, f);
  }
  template <class F>
  void for_each(Mode mode, F&& f) const {
    visit(*this, mode, f);
  }

  void set_zero();
  Parameters& operator+=(const Parameters& other);
  Parameters& operator*=(double scale);
  std::size_t count(Mode mode) const;

 private:
  template <class Self, class F>
  static void visit(Self& self, Mode mode, F& f) {
    f("source_embed", self.source_embed);
    f("target_embed", self.target_embed);
    auto stack = [&](const std::string& prefix, auto& layers) {
      for (std::size_t l = 0; l < layers.size(); ++l) {
        f(prefix + "." + std::to_string(l) + ".W", layers[l].W);
        f(prefix + "." + std::to_string(l) + ".b", layers[l].b);
      }
    };
    stack("encoder_fwd", self.encoder_fwd);
    stack("encoder_bwd", self.encoder_bwd);
    stack("decoder", self.decoder);
    f("merge_W", self.merge_W);
    f("merge_b", self.merge_b);
    f("combine_W", self.combine_W);
    f("combine_b", self.combine_b);
    f("out_W", self.out_W);
    f("out_b", self.out_b);
    if (mode == Mode::linear) f("interp", self.interp);
  }
};

struct EncoderOutput {
  Mat R;  // hidden x |F|, column j represents source word j
  // Top-layer states before dropout and the merge projection.
  Mat forward_states;
  Mat backward_states;
  std::vector<LstmState> forward_final;
  std::vector<LstmState> backward_final;
};

struct DecoderState {
  std::vector<LstmState> layers;
  int step = 0;

  const Vec& top() const { return layers.back().h; }
};

struct StepOutput {
  Vec attention;
  Vec context;
  Vec combined;
  Vec logits;  // out_W combined + out_b
  Vec lexicon;  // p_lex, empty in base mode
  Vec distribution;
  Mode mode = Mode::base;
};

// --- single-step building blocks -------------------------------------------

Vec attend(const Vec& hidden, const Mat& R);
Vec output_state(const Mat& combine_W, const Vec& combine_b, const Vec& hidden, const Vec& context);
Vec predict_base(const Mat& out_W, const Vec& out_b, const Vec& combined);
Vec predict_bias(const Mat& out_W, const Vec& out_b, const Vec& combined, const Vec& lexicon,
                 double epsilon);
Vec predict_linear(const Vec& model_dist, const Vec& lexicon, double x);

// Inverted dropout. Identity when not training or when rate is 0.
Vec apply_dropout(const Vec& v, double rate, bool training, std::uint64_t seed);
Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng);

// log p with the clamp used by the loss in linear mode.
double token_log_prob(const Vec& distribution, int token, Mode mode);

class Model {
 public:
  Model(ModelConfig config, std::uint64_t seed);
  Model(ModelConfig config, Parameters params);

  const ModelConfig& config() const { return config_; }
  Mode mode() const { return config_.mode; }
  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }

  double interpolation() const { return sigmoid(params_.interp(0, 0)); }

  EncoderOutput encode(std::span<const int> source) const;
  DecoderState initial_state() const;
  DecoderState step_decoder(int target, const DecoderState& state) const;
  // Distribution over the next target word given the current decoder state.
  // `lexicon` is required in bias and linear mode.
  StepOutput step(const EncoderOutput& encoded, const LexiconMatrix* lexicon,
                  const DecoderState& state) const;

  std::string serialize() const;
  static Model deserialize(const std::string& bytes);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

 private:
  ModelConfig config_;
  Parameters params_;
};

struct LossOptions {
  bool training = false;  // enables dropout
  std::uint64_t dropout_seed = 0;
};

struct SentenceLoss {
  double loss = 0.0;  // sum over target tokens of -log p
  int tokens = 0;
  Parameters grad;
};

// Teacher-forced NLL of `target` (fed BOS first; the caller terminates it
// with EOS). When `grad` is non-null the gradient of the loss is *added* to it.
double accumulate_sentence_loss(const Model& model, const LexiconMatrix* lexicon,
                                std::span<const int> source, std::span<const int> target,
                                const LossOptions& options, Parameters* grad);

SentenceLoss sentence_loss(const Model& model, const LexiconMatrix* lexicon,
                           std::span<const int> source, std::span<const int> target,
                           const LossOptions& options = {});

}  // namespace lexnmt
