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


#include "lexnmt/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lexnmt/io.hpp"

namespace lexnmt {

namespace {

constexpr double kLogFloor = 1e-12;

std::vector<LstmWeights> make_stack(int layers, int input, int hidden) {
  std::vector<LstmWeights> stack;
  for (int l = 0; l < layers; ++l) {
    const int in = l == 0 ? input : hidden;
    stack.push_back({Mat::Zero(4 * hidden, in + hidden), Mat::Zero(4 * hidden, 1)});
  }
  return stack;
}

void check_ids(std::span<const int> ids, int vocab, const char* what) {
  for (int id : ids)
    if (id < 0 || id >= vocab)
      throw Error(std::string(what) + " id " + std::to_string(id) + " outside vocabulary of size " +
                  std::to_string(vocab));
}

void check_lexicon(const ModelConfig& config, const LexiconMatrix* lexicon, std::size_t length) {
  if (!config.uses_lexicon()) return;
  if (!lexicon) throw Error(to_string(config.mode) + " mode requires a lexicon matrix");
  if (lexicon->rows() != config.target_vocab || lexicon->cols() != static_cast<int>(length))
    throw Error("lexicon matrix is " + std::to_string(lexicon->rows()) + "x" +
                std::to_string(lexicon->cols()) + ", expected " +
                std::to_string(config.target_vocab) + "x" + std::to_string(length));
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::base: return "base";
    case Mode::bias: return "bias";
    case Mode::linear: return "linear";
  }
  return "base";
}

Mode parse_mode(const std::string& name) {
  if (name == "base") return Mode::base;
  if (name == "bias") return Mode::bias;
  if (name == "linear") return Mode::linear;
  throw Error("unknown mode: " + name);
}

void ModelConfig::validate() const {
  if (layers < 1) throw Error("model needs at least one layer");
  if (hidden < 1 || embed < 1) throw Error("hidden and embedding sizes must be positive");
  if (source_vocab <= kNumReserved - 1 || target_vocab <= kNumReserved - 1)
    throw Error("vocabulary sizes must include the reserved symbols");
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw Error("dropout rate must be in [0, 1)");
}

// --- Parameters ------------------------------------------------------------

Parameters Parameters::zeros(const ModelConfig& c) {
  Parameters p;
  p.source_embed = Mat::Zero(c.embed, c.source_vocab);
  p.target_embed = Mat::Zero(c.embed, c.target_vocab);
  p.encoder_fwd = make_stack(c.layers, c.embed, c.hidden);
  p.encoder_bwd = make_stack(c.layers, c.embed, c.hidden);
  p.decoder = make_stack(c.layers, c.embed, c.hidden);
  p.merge_W = Mat::Zero(c.hidden, 2 * c.hidden);
  p.merge_b = Mat::Zero(c.hidden, 1);
  p.combine_W = Mat::Zero(c.hidden, 2 * c.hidden);
  p.combine_b = Mat::Zero(c.hidden, 1);
  p.out_W = Mat::Zero(c.target_vocab, c.hidden);
  p.out_b = Mat::Zero(c.target_vocab, 1);
  p.interp = Mat::Zero(1, 1);
  return p;
}

void Parameters::set_zero() {
  for_each(Mode::linear, [](const std::string&, Mat& m) { m.setZero(); });
}

Parameters& Parameters::operator+=(const Parameters& other) {
  std::vector<const Mat*> theirs;
  other.for_each(Mode::linear, [&](const std::string&, const Mat& m) { theirs.push_back(&m); });
  std::size_t k = 0;
  for_each(Mode::linear, [&](const std::string&, Mat& m) { m += *theirs[k++]; });
  return *this;
}

Parameters& Parameters::operator*=(double scale) {
  for_each(Mode::linear, [&](const std::string&, Mat& m) { m *= scale; });
  return *this;
}

std::size_t Parameters::count(Mode mode) const {
  std::size_t n = 0;
  for_each(mode, [&](const std::string&, const Mat& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

// --- building blocks -------------------------------------------------------

Vec attend(const Vec& hidden, const Mat& R) {
  if (hidden.size() != R.rows())
    throw Error("attend: hidden size " + std::to_string(hidden.size()) +
                " does not match encoder rows " + std::to_string(R.rows()));
  return softmax(R.transpose() * hidden);
}

Vec output_state(const Mat& combine_W, const Vec& combine_b, const Vec& hidden, const Vec& context) {
  if (combine_W.cols() != hidden.size() + context.size() || combine_W.rows() != combine_b.size())
    throw Error("output_state: dimension mismatch");
  return combine_W.leftCols(hidden.size()) * hidden + combine_W.rightCols(context.size()) * context + combine_b;
}

Vec predict_base(const Mat& out_W, const Vec& out_b, const Vec& combined) {
  return softmax(out_W * combined + out_b);
}

Vec predict_bias(const Mat& out_W, const Vec& out_b, const Vec& combined, const Vec& lexicon,
                 double epsilon) {
  if (lexicon.size() != out_W.rows()) throw Error("predict_bias: lexicon size mismatch");
  return softmax(out_W * combined + out_b + (lexicon.array() + epsilon).log().matrix());
}

Vec predict_linear(const Vec& model_dist, const Vec& lexicon, double x) {
  if (lexicon.size() != model_dist.size()) throw Error("predict_linear: size mismatch");
  const double lambda = sigmoid(x);
  return lambda * lexicon + (1.0 - lambda) * model_dist;
}

Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, std::mt19937_64& rng) {
  Mat mask(rows, cols);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = unif(rng) < rate ? 0.0 : keep_scale;
  return mask;
}

Vec apply_dropout(const Vec& v, double rate, bool training, std::uint64_t seed) {
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must be in [0, 1)");
  if (!training || rate == 0.0) return v;
  std::mt19937_64 rng(seed);
  return v.cwiseProduct(dropout_mask(v.size(), 1, rate, rng).col(0));
}

double token_log_prob(const Vec& distribution, int token, Mode mode) {
  const double p = distribution(token);
  return mode == Mode::linear ? std::log(std::max(p, kLogFloor)) : std::log(p);
}

// --- Model -----------------------------------------------------------------

Model::Model(ModelConfig config, std::uint64_t seed) : config_(config) {
  config_.validate();
  params_ = Parameters::zeros(config_);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  params_.for_each(Mode::base, [&](const std::string&, Mat& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = unif(rng);
  });
  params_.interp.setZero();
}

Model::Model(ModelConfig config, Parameters params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  auto expected = Parameters::zeros(config_);
  std::vector<std::pair<std::string, Eigen::Index>> shapes;
  expected.for_each(Mode::linear, [&](const std::string& name, const Mat& m) {
    shapes.emplace_back(name, m.rows() * 100003 + m.cols());
  });
  std::size_t k = 0;
  params_.for_each(Mode::linear, [&](const std::string& name, const Mat& m) {
    if (k >= shapes.size() || m.rows() * 100003 + m.cols() != shapes[k].second)
      throw Error("parameter '" + name + "' has inconsistent dimensions");
    ++k;
  });
  if (params_.encoder_fwd.size() != static_cast<std::size_t>(config_.layers) ||
      params_.encoder_bwd.size() != static_cast<std::size_t>(config_.layers) ||
      params_.decoder.size() != static_cast<std::size_t>(config_.layers))
    throw Error("parameter layer count does not match the configuration");
}

EncoderOutput Model::encode(std::span<const int> source) const {
  if (source.empty()) throw Error("cannot encode an empty source sentence");
  check_ids(source, config_.source_vocab, "source");
  const auto n = static_cast<Eigen::Index>(source.size());
  Mat X(config_.embed, n);
  for (Eigen::Index j = 0; j < n; ++j) X.col(j) = params_.source_embed.col(source[j]);

  EncoderOutput out;
  out.forward_final.resize(params_.encoder_fwd.size());
  out.backward_final.resize(params_.encoder_bwd.size());
  Mat cur = X;
  for (std::size_t l = 0; l < params_.encoder_fwd.size(); ++l)
    cur = lstm_forward(params_.encoder_fwd[l], cur, false, nullptr, &out.forward_final[l]);
  out.forward_states = cur;
  cur = X;
  for (std::size_t l = 0; l < params_.encoder_bwd.size(); ++l)
    cur = lstm_forward(params_.encoder_bwd[l], cur, true, nullptr, &out.backward_final[l]);
  out.backward_states = cur;

  const auto H = config_.hidden;
  out.R = params_.merge_W.leftCols(H) * out.backward_states +
          params_.merge_W.rightCols(H) * out.forward_states;
  out.R.colwise() += params_.merge_b.col(0);
  return out;
}

DecoderState Model::initial_state() const {
  DecoderState s;
  s.layers.assign(params_.decoder.size(),
                  {Vec::Zero(config_.hidden), Vec::Zero(config_.hidden)});
  return s;
}

DecoderState Model::step_decoder(int target, const DecoderState& state) const {
  if (target < 0 || target >= config_.target_vocab)
    throw Error("target id " + std::to_string(target) + " outside vocabulary");
  DecoderState next;
  next.step = state.step + 1;
  next.layers.reserve(state.layers.size());
  Vec x = params_.target_embed.col(target);
  for (std::size_t l = 0; l < params_.decoder.size(); ++l) {
    next.layers.push_back(lstm_step(params_.decoder[l], x, state.layers[l]));
    x = next.layers.back().h;
  }
  return next;
}

StepOutput Model::step(const EncoderOutput& encoded, const LexiconMatrix* lexicon,
                       const DecoderState& state) const {
  check_lexicon(config_, lexicon, static_cast<std::size_t>(encoded.R.cols()));
  StepOutput out;
  out.mode = config_.mode;
  const Vec& h = state.top();
  out.attention = attend(h, encoded.R);
  out.context = encoded.R * out.attention;
  out.combined = output_state(params_.combine_W, params_.combine_b.col(0), h, out.context);
  out.logits = params_.out_W * out.combined + params_.out_b.col(0);
  switch (config_.mode) {
    case Mode::base:
      out.distribution = softmax(out.logits);
      break;
    case Mode::bias:
      out.lexicon = lexicon_predictive(*lexicon, out.attention);
      out.distribution =
          softmax(out.logits + (out.lexicon.array() + config_.epsilon).log().matrix());
      break;
    case Mode::linear:
      out.lexicon = lexicon_predictive(*lexicon, out.attention);
      out.distribution = predict_linear(softmax(out.logits), out.lexicon, params_.interp(0, 0));
      break;
  }
  return out;
}

// --- loss and gradients ----------------------------------------------------

double accumulate_sentence_loss(const Model& model, const LexiconMatrix* lexicon,
                                std::span<const int> source, std::span<const int> target,
                                const LossOptions& options, Parameters* grad) {
  const auto& cfg = model.config();
  const auto& P = model.params();
  if (source.empty()) throw Error("sentence_loss: empty source sentence");
  if (target.empty()) throw Error("sentence_loss: empty target sentence");
  check_ids(source, cfg.source_vocab, "source");
  check_ids(target, cfg.target_vocab, "target");
  check_lexicon(cfg, lexicon, source.size());

  const int H = cfg.hidden;
  const auto n = static_cast<Eigen::Index>(source.size());
  const auto T = static_cast<Eigen::Index>(target.size());
  const bool dropout = options.training && cfg.dropout > 0.0;
  std::mt19937_64 rng(options.dropout_seed);

  // Encoder.
  Mat X(cfg.embed, n);
  for (Eigen::Index j = 0; j < n; ++j) X.col(j) = P.source_embed.col(source[j]);
  const std::size_t d = P.encoder_fwd.size();
  std::vector<std::vector<LstmStepCache>> fwd_cache(d), bwd_cache(d), dec_cache(d);
  Mat F = X, B = X;
  for (std::size_t l = 0; l < d; ++l) F = lstm_forward(P.encoder_fwd[l], F, false, &fwd_cache[l]);
  for (std::size_t l = 0; l < d; ++l) B = lstm_forward(P.encoder_bwd[l], B, true, &bwd_cache[l]);
  Mat mask_f, mask_b, mask_d;
  if (dropout) {
    mask_f = dropout_mask(H, n, cfg.dropout, rng);
    mask_b = dropout_mask(H, n, cfg.dropout, rng);
    F = F.cwiseProduct(mask_f);
    B = B.cwiseProduct(mask_b);
  }
  Mat cat(2 * H, n);
  cat.topRows(H) = B;
  cat.bottomRows(H) = F;
  Mat R = P.merge_W * cat;
  R.colwise() += P.merge_b.col(0);

  // Decoder with teacher forcing: inputs are BOS, e_1 .. e_{T-1}.
  Mat Y(cfg.embed, T);
  Y.col(0) = P.target_embed.col(kBos);
  for (Eigen::Index t = 1; t < T; ++t) Y.col(t) = P.target_embed.col(target[t - 1]);
  Mat S = Y;
  for (std::size_t l = 0; l < d; ++l) S = lstm_forward(P.decoder[l], S, false, &dec_cache[l]);
  if (dropout) {
    mask_d = dropout_mask(H, T, cfg.dropout, rng);
    S = S.cwiseProduct(mask_d);
  }

  const double lambda = sigmoid(P.interp(0, 0));
  struct StepCache {
    Vec a, c, z, combined, p, p_model, p_lex;
  };
  std::vector<StepCache> steps(static_cast<std::size_t>(T));
  double loss = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    auto& st = steps[static_cast<std::size_t>(t)];
    const int y = target[t];
    st.a = softmax(R.transpose() * S.col(t));
    st.c = R * st.a;
    st.z.resize(2 * H);
    st.z.head(H) = S.col(t);
    st.z.tail(H) = st.c;
    st.combined = P.combine_W * st.z + P.combine_b.col(0);
    Vec logits = P.out_W * st.combined + P.out_b.col(0);
    switch (cfg.mode) {
      case Mode::base:
        st.p = softmax(logits);
        loss -= std::log(st.p(y));
        break;
      case Mode::bias:
        st.p_lex = lexicon->matrix() * st.a;
        st.p = softmax(logits + (st.p_lex.array() + cfg.epsilon).log().matrix());
        loss -= std::log(st.p(y));
        break;
      case Mode::linear:
        st.p_model = softmax(logits);
        st.p_lex = lexicon->matrix() * st.a;
        st.p = lambda * st.p_lex + (1.0 - lambda) * st.p_model;
        loss -= std::log(std::max(st.p(y), kLogFloor));
        break;
    }
  }
  if (!std::isfinite(loss)) {
    std::ostringstream msg;
    msg << "non-finite sentence loss (" << loss << ") in " << to_string(cfg.mode)
        << " mode; source length " << n << ", target length " << T;
    throw Error(msg.str());
  }
  if (!grad) return loss;

  Parameters& G = *grad;
  Mat dR = Mat::Zero(H, n);
  Mat dS(H, T);
  Vec dlogits(cfg.target_vocab);
  for (Eigen::Index t = 0; t < T; ++t) {
    const auto& st = steps[static_cast<std::size_t>(t)];
    const int y = target[t];
    Vec da = Vec::Zero(n);
    switch (cfg.mode) {
      case Mode::base:
        dlogits = st.p;
        dlogits(y) -= 1.0;
        break;
      case Mode::bias: {
        dlogits = st.p;
        dlogits(y) -= 1.0;
        Vec dlex = dlogits.cwiseQuotient((st.p_lex.array() + cfg.epsilon).matrix());
        da.noalias() += lexicon->matrix().transpose() * dlex;
        break;
      }
      case Mode::linear: {
        const double py = st.p(y);
        if (py < kLogFloor) {
          dlogits.setZero();
          break;
        }
        const double g_model = -(1.0 - lambda) / py;
        dlogits = -g_model * st.p_model(y) * st.p_model;
        dlogits(y) += g_model * st.p_model(y);
        // p_lex = L a, only component y carries gradient.
        da += (-lambda / py) * Vec(lexicon->matrix().row(y).transpose());
        const double dlambda = -(st.p_lex(y) - st.p_model(y)) / py;
        G.interp(0, 0) += dlambda * lambda * (1.0 - lambda);
        break;
      }
    }
    G.out_W.noalias() += dlogits * st.combined.transpose();
    G.out_b.col(0) += dlogits;
    Vec dcombined = P.out_W.transpose() * dlogits;
    G.combine_W.noalias() += dcombined * st.z.transpose();
    G.combine_b.col(0) += dcombined;
    Vec dz = P.combine_W.transpose() * dcombined;
    Vec ds = dz.head(H);
    const Vec dc = dz.tail(H);
    da.noalias() += R.transpose() * dc;
    dR.noalias() += dc * st.a.transpose();
    const Vec dalpha = st.a.cwiseProduct((da.array() - st.a.dot(da)).matrix());
    ds.noalias() += R * dalpha;
    dR.noalias() += S.col(t) * dalpha.transpose();
    dS.col(t) = ds;
  }

  if (dropout) dS = dS.cwiseProduct(mask_d);
  for (std::size_t l = d; l-- > 0;) dS = lstm_backward(P.decoder[l], dec_cache[l], dS, false, G.decoder[l]);
  G.target_embed.col(kBos) += dS.col(0);
  for (Eigen::Index t = 1; t < T; ++t) G.target_embed.col(target[t - 1]) += dS.col(t);

  G.merge_W.noalias() += dR * cat.transpose();
  G.merge_b.col(0) += dR.rowwise().sum();
  Mat dcat = P.merge_W.transpose() * dR;
  Mat dB = dcat.topRows(H);
  Mat dF = dcat.bottomRows(H);
  if (dropout) {
    dB = dB.cwiseProduct(mask_b);
    dF = dF.cwiseProduct(mask_f);
  }
  for (std::size_t l = d; l-- > 0;) dF = lstm_backward(P.encoder_fwd[l], fwd_cache[l], dF, false, G.encoder_fwd[l]);
  for (std::size_t l = d; l-- > 0;) dB = lstm_backward(P.encoder_bwd[l], bwd_cache[l], dB, true, G.encoder_bwd[l]);
  for (Eigen::Index j = 0; j < n; ++j) G.source_embed.col(source[j]) += dF.col(j) + dB.col(j);
  return loss;
}

SentenceLoss sentence_loss(const Model& model, const LexiconMatrix* lexicon,
                           std::span<const int> source, std::span<const int> target,
                           const LossOptions& options) {
  SentenceLoss out;
  out.grad = Parameters::zeros(model.config());
  out.loss = accumulate_sentence_loss(model, lexicon, source, target, options, &out.grad);
  out.tokens = static_cast<int>(target.size());
  return out;
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'L', 'E', 'X', 'N', 'M', 'T', 'M', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  std::uint64_t u(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw Error("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(u(4)); }
  std::uint64_t u64() { return u(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error("model file truncated");
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string Model::serialize() const {
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(config_.mode));
  put_u32(out, static_cast<std::uint32_t>(config_.layers));
  put_u32(out, static_cast<std::uint32_t>(config_.hidden));
  put_u32(out, static_cast<std::uint32_t>(config_.embed));
  put_u32(out, static_cast<std::uint32_t>(config_.source_vocab));
  put_u32(out, static_cast<std::uint32_t>(config_.target_vocab));
  put_f64(out, config_.epsilon);
  put_f64(out, params_.interp(0, 0));
  put_f64(out, config_.dropout);
  std::uint32_t tensors = 0;
  params_.for_each(config_.mode, [&](const std::string&, const Mat&) { ++tensors; });
  put_u32(out, tensors);
  params_.for_each(config_.mode, [&](const std::string& name, const Mat& m) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    if (m.cols() == 1) {
      put_u32(out, 1);
      put_u64(out, static_cast<std::uint64_t>(m.rows()));
    } else {
      put_u32(out, 2);
      put_u64(out, static_cast<std::uint64_t>(m.rows()));
      put_u64(out, static_cast<std::uint64_t>(m.cols()));
    }
    for (Eigen::Index i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
  });
  return out;
}

Model Model::deserialize(const std::string& bytes) {
  Reader in(bytes);
  if (in.str(sizeof kMagic) != std::string(kMagic, sizeof kMagic))
    throw Error("not a model file (bad magic)");
  if (in.u32() != kFormatVersion) throw Error("unsupported model format version");
  ModelConfig cfg;
  const auto mode = in.u32();
  if (mode > 2) throw Error("model file has unknown mode");
  cfg.mode = static_cast<Mode>(mode);
  cfg.layers = static_cast<int>(in.u32());
  cfg.hidden = static_cast<int>(in.u32());
  cfg.embed = static_cast<int>(in.u32());
  cfg.source_vocab = static_cast<int>(in.u32());
  cfg.target_vocab = static_cast<int>(in.u32());
  cfg.epsilon = in.f64();
  const double x = in.f64();
  cfg.dropout = in.f64();
  cfg.validate();

  auto params = Parameters::zeros(cfg);
  const auto count = in.u32();
  std::uint32_t seen = 0;
  params.for_each(cfg.mode, [&](const std::string& name, Mat& m) {
    if (seen++ >= count) throw Error("model file is missing tensor '" + name + "'");
    const auto stored = in.str(in.u32());
    if (stored != name) throw Error("model file: expected tensor '" + name + "', got '" + stored + "'");
    const auto rank = in.u32();
    std::uint64_t rows = 0, cols = 1;
    if (rank == 1) {
      rows = in.u64();
    } else if (rank == 2) {
      rows = in.u64();
      cols = in.u64();
    } else {
      throw Error("model file: tensor '" + name + "' has unsupported rank");
    }
    if (rows != static_cast<std::uint64_t>(m.rows()) || cols != static_cast<std::uint64_t>(m.cols()))
      throw Error("model file: tensor '" + name + "' has dimensions inconsistent with the header");
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = in.f64();
  });
  if (seen != count || !in.done()) throw Error("model file has trailing data");
  params.interp(0, 0) = x;
  return Model(cfg, std::move(params));
}

void Model::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  write_atomic(path, [&](std::ostream& out) { out.write(bytes.data(), static_cast<long>(bytes.size())); },
               true);
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize(ss.str());
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace lexnmt
