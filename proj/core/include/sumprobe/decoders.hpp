#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sumprobe/autograd.hpp"
#include "sumprobe/types.hpp"

namespace sumprobe::decoders {

using nn::Expr;
using nn::Mat;
using nn::Parameter;
using nn::Tape;

// Selects min(k, n) indices by top probability, ties toward the lower index,
// reported in ascending document order.
std::vector<int> top_k_indices(const std::vector<double>& probs, int k);

// Non-auto-regressive head: per-sentence probability from a two-layer map.
class SeqLabHead {
 public:
  SeqLabHead(int ctx_dim, int hidden_dim, std::uint64_t seed);

  // context_reps: ctx_dim x n; returns n x 1 logits
  Expr logits(Tape& tape, Expr context_reps);

  ExtractionResult decode(Tape& tape, Expr context_reps, int k,
                          const std::string& doc_id);
  // mean binary cross-entropy against 0/1 labels
  Expr loss(Tape& tape, Expr context_reps, const std::vector<int>& labels);

  std::vector<Parameter*> parameters();

 private:
  Parameter w1_, b1_, w2_, b2_;
};

struct PointerTrace {
  ExtractionResult result;
  std::vector<Expr> step_logprobs;        // log pi(i_t | i_<t)
  std::vector<std::vector<double>> step_distributions;
};

// Auto-regressive pointer decoder with glimpse attention. At each step the
// decoder state attends over the sentences (glimpse), the glimpse vector
// re-parameterizes the final pointer attention, and selected indices are
// masked out of later steps.
class PointerDecoder {
 public:
  PointerDecoder(int ctx_dim, int state_dim, int attn_dim, std::uint64_t seed);

  // Greedy argmax decode of k distinct indices.
  PointerTrace decode(Tape& tape, Expr context_reps, int k,
                      const std::string& doc_id);
  // Ancestral sampling with a caller-owned RNG.
  PointerTrace sample(Tape& tape, Expr context_reps, int k,
                      const std::string& doc_id, std::mt19937_64& rng);
  // Teacher-forced log-probabilities of a target selection order.
  std::vector<Expr> stepwise_logprobs(Tape& tape, Expr context_reps,
                                      const std::vector<int>& target_order);

  std::vector<Parameter*> parameters();

 private:
  enum class Mode { kGreedy, kSample, kForced };
  PointerTrace run(Tape& tape, Expr context_reps, int steps, Mode mode,
                   const std::vector<int>* targets, const std::string& doc_id,
                   std::mt19937_64* rng);

  int ctx_dim_, state_dim_, attn_dim_;
  Parameter cell_wx_, cell_wh_, cell_b_;  // decoder LSTM cell
  Parameter init_w_, init_b_;             // initial state from mean context
  Parameter start_;                       // first-step input
  Parameter wg1_, wg2_, vg_;              // glimpse
  Parameter wp1_, wp2_, vp_;              // pointer
};

}  // namespace sumprobe::decoders
