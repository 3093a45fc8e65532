#include "sumprobe/encoders.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace sumprobe::encoders {

namespace {

Mat glorot(int rows, int cols, std::mt19937_64& rng) {
  double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> unif(-limit, limit);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = unif(rng);
  return m;
}

}  // namespace

void EncoderConfig::validate(bool allow_zero_mix) const {
  if (layers < 1) throw std::invalid_argument("encoder: layers must be >= 1");
  if (width < 1) throw std::invalid_argument("encoder: width must be >= 1");
  if (alpha < 0.0 || beta < 0.0)
    throw std::invalid_argument("encoder: mixing coefficients must be nonnegative");
  if (!allow_zero_mix && alpha == 0.0 && beta == 0.0)
    throw std::invalid_argument("encoder: alpha and beta cannot both be zero");
  if (kind == Kind::kSelfAttention) {
    if (heads < 1 || width % heads != 0)
      throw std::invalid_argument("encoder: width must be divisible by heads");
  }
}

Mat sinusoidal_positions(int count, int dim) {
  Mat pe(dim, count);
  for (int pos = 0; pos < count; ++pos) {
    for (int i = 0; i < dim; ++i) {
      double angle = pos / std::pow(10000.0, 2.0 * (i / 2) / dim);
      pe(i, pos) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

SentenceEncoderCnn::SentenceEncoderCnn(int embed_dim, int out_dim, std::uint64_t seed)
    : embed_dim_(embed_dim), out_dim_(out_dim), widths_{3, 4, 5} {
  if (embed_dim < 1) throw std::invalid_argument("cnn encoder: bad embed dim");
  if (out_dim < static_cast<int>(widths_.size()) ||
      out_dim % static_cast<int>(widths_.size()) != 0)
    throw std::invalid_argument("cnn encoder: out_dim must be a positive multiple of 3");
  const int channels = out_dim / static_cast<int>(widths_.size());
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < widths_.size(); ++i) {
    filters_.emplace_back("cnn.w" + std::to_string(widths_[i]),
                          glorot(channels, embed_dim * widths_[i], rng));
    biases_.emplace_back("cnn.b" + std::to_string(widths_[i]),
                         Mat::Zero(channels, 1));
  }
}

Expr SentenceEncoderCnn::apply(Tape& tape, Expr token_embeds) {
  if (token_embeds.value().rows() != embed_dim_)
    throw std::invalid_argument("cnn encoder: embedding width mismatch");
  const int max_width = widths_.back();
  Expr padded = token_embeds;
  if (token_embeds.value().cols() < max_width) {
    Expr zeros = tape.constant(Mat::Zero(
        embed_dim_, max_width - token_embeds.value().cols()));
    padded = nn::concat_cols({token_embeds, zeros});
  }
  const int T = static_cast<int>(padded.value().cols());
  std::vector<Expr> pooled;
  for (size_t i = 0; i < widths_.size(); ++i) {
    const int w = widths_[i];
    const int windows = T - w + 1;
    // im2col: stack the w shifted views, one matmul per kernel width
    std::vector<Expr> shifted;
    for (int o = 0; o < w; ++o) shifted.push_back(cols(padded, o, windows));
    Expr patches = concat_rows(shifted);  // (embed_dim * w) x windows
    Expr fmap = tanh_(affine(tape.param(filters_[i]), patches, tape.param(biases_[i])));
    pooled.push_back(max_over_cols(fmap));
  }
  return concat_rows(pooled);
}

std::vector<Parameter*> SentenceEncoderCnn::parameters() {
  std::vector<Parameter*> out;
  for (auto& p : filters_) out.push_back(&p);
  for (auto& p : biases_) out.push_back(&p);
  return out;
}

void lstm_step(Tape& tape, Parameter& wx, Parameter& wh, Parameter& b, Expr x,
               Expr& h, Expr& c) {
  const int hidden = static_cast<int>(wh.value.cols());
  Expr gates = add(add(matmul(tape.param(wx), x), matmul(tape.param(wh), h)),
                   tape.param(b));
  Expr i = sigmoid_(rows(gates, 0, hidden));
  Expr f = sigmoid_(rows(gates, hidden, hidden));
  Expr g = tanh_(rows(gates, 2 * hidden, hidden));
  Expr o = sigmoid_(rows(gates, 3 * hidden, hidden));
  c = add(cmul(f, c), cmul(i, g));
  h = cmul(o, tanh_(c));
}

DocumentEncoderLstm::DocumentEncoderLstm(int input_dim, const EncoderConfig& config,
                                         std::uint64_t seed)
    : config_(config), input_dim_(input_dim) {
  if (config.kind != EncoderConfig::Kind::kRecurrent)
    throw std::invalid_argument("lstm encoder: config kind mismatch");
  config.validate(true);
  if (config.width % 2 != 0)
    throw std::invalid_argument("lstm encoder: width must be even");
  hidden_ = config.width / 2;
  std::mt19937_64 rng(seed);
  for (int l = 0; l < config.layers; ++l) {
    const int in = (l == 0) ? input_dim : 2 * hidden_;
    Layer layer;
    auto make = [&](const std::string& tag) {
      return Direction{
          Parameter("lstm." + std::to_string(l) + "." + tag + ".wx",
                    glorot(4 * hidden_, in, rng)),
          Parameter("lstm." + std::to_string(l) + "." + tag + ".wh",
                    glorot(4 * hidden_, hidden_, rng)),
          Parameter("lstm." + std::to_string(l) + "." + tag + ".b",
                    Mat::Zero(4 * hidden_, 1))};
    };
    layer.fwd = make("fwd");
    layer.bwd = make("bwd");
    layers_.push_back(std::move(layer));
  }
  proj_w_ = Parameter("lstm.proj.w", glorot(config.width, 2 * hidden_, rng));
  proj_b_ = Parameter("lstm.proj.b", Mat::Zero(config.width, 1));
}

Expr DocumentEncoderLstm::apply(Tape& tape, Expr sentence_reps) {
  if (!sentence_reps.value().allFinite())
    throw std::invalid_argument("lstm encoder: non-finite input");
  const int n = static_cast<int>(sentence_reps.value().cols());
  std::vector<Expr> inputs(n);
  for (int i = 0; i < n; ++i) inputs[i] = cols(sentence_reps, i, 1);

  for (auto& layer : layers_) {
    std::vector<Expr> fwd(n), bwd(n);
    Expr h = tape.constant(Mat::Zero(hidden_, 1));
    Expr c = tape.constant(Mat::Zero(hidden_, 1));
    for (int i = 0; i < n; ++i) {
      lstm_step(tape, layer.fwd.wx, layer.fwd.wh, layer.fwd.b, inputs[i], h, c);
      fwd[i] = h;
    }
    h = tape.constant(Mat::Zero(hidden_, 1));
    c = tape.constant(Mat::Zero(hidden_, 1));
    for (int i = n - 1; i >= 0; --i) {
      lstm_step(tape, layer.bwd.wx, layer.bwd.wh, layer.bwd.b, inputs[i], h, c);
      bwd[i] = h;
    }
    for (int i = 0; i < n; ++i) inputs[i] = nn::concat_rows({fwd[i], bwd[i]});
  }
  Expr stacked = concat_cols(inputs);  // 2h x n
  return affine(tape.param(proj_w_), stacked, tape.param(proj_b_));
}

std::vector<Parameter*> DocumentEncoderLstm::parameters() {
  std::vector<Parameter*> out;
  for (auto& layer : layers_) {
    for (Direction* d : {&layer.fwd, &layer.bwd}) {
      out.push_back(&d->wx);
      out.push_back(&d->wh);
      out.push_back(&d->b);
    }
  }
  out.push_back(&proj_w_);
  out.push_back(&proj_b_);
  return out;
}

DocumentEncoderTransformer::DocumentEncoderTransformer(const EncoderConfig& config,
                                                       std::uint64_t seed)
    : config_(config) {
  if (config.kind != EncoderConfig::Kind::kSelfAttention)
    throw std::invalid_argument("transformer encoder: config kind mismatch");
  config.validate(true);
  const int w = config.width;
  std::mt19937_64 rng(seed);
  for (int l = 0; l < config.layers; ++l) {
    const std::string pre = "tf." + std::to_string(l) + ".";
    Layer layer{
        Parameter(pre + "wq", glorot(w, w, rng)),
        Parameter(pre + "wk", glorot(w, w, rng)),
        Parameter(pre + "wv", glorot(w, w, rng)),
        Parameter(pre + "wo", glorot(w, w, rng)),
        Parameter(pre + "ff1.w", glorot(4 * w, w, rng)),
        Parameter(pre + "ff1.b", Mat::Zero(4 * w, 1)),
        Parameter(pre + "ff2.w", glorot(w, 4 * w, rng)),
        Parameter(pre + "ff2.b", Mat::Zero(w, 1)),
        Parameter(pre + "ln1.g", Mat::Ones(w, 1)),
        Parameter(pre + "ln1.b", Mat::Zero(w, 1)),
        Parameter(pre + "ln2.g", Mat::Ones(w, 1)),
        Parameter(pre + "ln2.b", Mat::Zero(w, 1)),
    };
    layers_.push_back(std::move(layer));
  }
}

void DocumentEncoderTransformer::set_mixing(double alpha, double beta) {
  config_.alpha = alpha;
  config_.beta = beta;
  config_.validate(true);
}

Expr DocumentEncoderTransformer::apply(Tape& tape, Expr sentence_reps) {
  if (!sentence_reps.value().allFinite())
    throw std::invalid_argument("transformer encoder: non-finite input");
  const int w = config_.width;
  if (sentence_reps.value().rows() != w)
    throw std::invalid_argument("transformer encoder: width mismatch");
  const int n = static_cast<int>(sentence_reps.value().cols());
  const int heads = config_.heads;
  const int dk = w / heads;

  Expr x = scale(sentence_reps, config_.alpha);
  if (config_.beta != 0.0) {
    Expr pe = tape.constant(sinusoidal_positions(n, w));
    x = add(x, scale(pe, config_.beta));
  }

  const double inv_sqrt_dk = 1.0 / std::sqrt(static_cast<double>(dk));
  for (auto& layer : layers_) {
    Expr q = matmul(tape.param(layer.wq), x);
    Expr k = matmul(tape.param(layer.wk), x);
    Expr v = matmul(tape.param(layer.wv), x);
    std::vector<Expr> head_outs;
    for (int h = 0; h < heads; ++h) {
      Expr qh = rows(q, h * dk, dk);
      Expr kh = rows(k, h * dk, dk);
      Expr vh = rows(v, h * dk, dk);
      // column j of scores: attention of query j over all keys
      Expr scores = scale(matmul(transpose(kh), qh), inv_sqrt_dk);  // n x n
      Expr attn = softmax_cols(scores);
      head_outs.push_back(matmul(vh, attn));  // dk x n
    }
    Expr attended = matmul(tape.param(layer.wo), concat_rows(head_outs));
    x = layer_norm_col(add(x, attended), tape.param(layer.ln1_g),
                       tape.param(layer.ln1_b));
    Expr ff = affine(tape.param(layer.ff2_w),
                     relu_(affine(tape.param(layer.ff1_w), x, tape.param(layer.ff1_b))),
                     tape.param(layer.ff2_b));
    x = layer_norm_col(add(x, ff), tape.param(layer.ln2_g), tape.param(layer.ln2_b));
  }
  return x;
}

std::vector<Parameter*> DocumentEncoderTransformer::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    for (Parameter* p : {&l.wq, &l.wk, &l.wv, &l.wo, &l.ff1_w, &l.ff1_b, &l.ff2_w,
                         &l.ff2_b, &l.ln1_g, &l.ln1_b, &l.ln2_g, &l.ln2_b})
      out.push_back(p);
  }
  return out;
}

}  // namespace sumprobe::encoders
