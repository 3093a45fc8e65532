#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sumprobe/autograd.hpp"

namespace sumprobe::encoders {

using nn::Expr;
using nn::Mat;
using nn::Parameter;
using nn::Tape;

struct EncoderConfig {
  enum class Kind { kRecurrent, kSelfAttention };
  Kind kind = Kind::kRecurrent;
  int layers = 2;
  int width = 512;  // d_c and self-attention model width
  int heads = 8;
  double alpha = 1.0;  // sentence-embedding coefficient
  double beta = 1.0;   // positional-embedding coefficient

  void validate(bool allow_zero_mix = false) const;
};

// Sinusoidal positional embeddings, one column per position.
Mat sinusoidal_positions(int count, int dim);

// Convolutional sentence encoder: kernel widths {3,4,5} with equal channel
// counts, tanh, max-over-time pooling, concatenation. Short sentences are
// zero-padded to the widest kernel.
class SentenceEncoderCnn {
 public:
  SentenceEncoderCnn(int embed_dim, int out_dim, std::uint64_t seed);

  int embed_dim() const { return embed_dim_; }
  int out_dim() const { return out_dim_; }

  // token_embeds: embed_dim x T, T >= 1; returns out_dim x 1
  Expr apply(Tape& tape, Expr token_embeds);
  std::vector<Parameter*> parameters();

 private:
  int embed_dim_;
  int out_dim_;
  std::vector<int> widths_;
  std::vector<Parameter> filters_;  // channels x (embed_dim * width)
  std::vector<Parameter> biases_;
};

// Stacked bidirectional LSTM over the sentence sequence; forward and backward
// states are concatenated, then linearly projected to the configured width.
class DocumentEncoderLstm {
 public:
  DocumentEncoderLstm(int input_dim, const EncoderConfig& config, std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }

  // sentence_reps: input_dim x n; returns width x n
  Expr apply(Tape& tape, Expr sentence_reps);
  std::vector<Parameter*> parameters();

 private:
  struct Direction {
    Parameter wx, wh, b;
  };
  struct Layer {
    Direction fwd, bwd;
  };

  EncoderConfig config_;
  int input_dim_;
  int hidden_;  // per direction
  std::vector<Layer> layers_;
  Parameter proj_w_, proj_b_;
};

// Post-norm self-attention blocks over alpha * sentence_reps + beta * PE.
class DocumentEncoderTransformer {
 public:
  DocumentEncoderTransformer(const EncoderConfig& config, std::uint64_t seed);

  const EncoderConfig& config() const { return config_; }
  void set_mixing(double alpha, double beta);

  // sentence_reps: width x n; returns width x n
  Expr apply(Tape& tape, Expr sentence_reps);
  std::vector<Parameter*> parameters();

 private:
  struct Layer {
    Parameter wq, wk, wv, wo;
    Parameter ff1_w, ff1_b, ff2_w, ff2_b;
    Parameter ln1_g, ln1_b, ln2_g, ln2_b;
  };

  EncoderConfig config_;
  std::vector<Layer> layers_;
};

// One LSTM step; h and c are updated in place. Gate layout along the rows of
// the 4h-wide gate block: input, forget, cell, output.
void lstm_step(Tape& tape, Parameter& wx, Parameter& wh, Parameter& b, Expr x,
               Expr& h, Expr& c);

}  // namespace sumprobe::encoders
