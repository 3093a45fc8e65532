#include "sumprobe/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sumprobe/encoders.hpp"

namespace sumprobe::decoders {

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

std::vector<int> top_k_indices(const std::vector<double>& probs, int k) {
  if (k < 1) throw std::invalid_argument("top_k_indices: k must be >= 1");
  const int n = static_cast<int>(probs.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&probs](int a, int b) { return probs[a] > probs[b]; });
  order.resize(std::min(k, n));
  std::sort(order.begin(), order.end());
  return order;
}

SeqLabHead::SeqLabHead(int ctx_dim, int hidden_dim, std::uint64_t seed) {
  if (ctx_dim < 1 || hidden_dim < 1)
    throw std::invalid_argument("seqlab head: bad dimensions");
  std::mt19937_64 rng(seed);
  w1_ = Parameter("seqlab.w1", glorot(hidden_dim, ctx_dim, rng));
  b1_ = Parameter("seqlab.b1", Mat::Zero(hidden_dim, 1));
  w2_ = Parameter("seqlab.w2", glorot(1, hidden_dim, rng));
  b2_ = Parameter("seqlab.b2", Mat::Zero(1, 1));
}

Expr SeqLabHead::logits(Tape& tape, Expr context_reps) {
  Expr h = tanh_(affine(tape.param(w1_), context_reps, tape.param(b1_)));
  Expr z = affine(tape.param(w2_), h, tape.param(b2_));  // 1 x n
  return transpose(z);                                   // n x 1
}

ExtractionResult SeqLabHead::decode(Tape& tape, Expr context_reps, int k,
                                    const std::string& doc_id) {
  Expr z = logits(tape, context_reps);
  const Mat& zv = z.value();
  std::vector<double> probs(zv.rows());
  for (Eigen::Index i = 0; i < zv.rows(); ++i)
    probs[i] = 1.0 / (1.0 + std::exp(-zv(i, 0)));
  ExtractionResult res;
  res.doc_id = doc_id;
  res.selected = top_k_indices(probs, k);
  for (int idx : res.selected) res.step_scores.push_back(probs[idx]);
  return res;
}

Expr SeqLabHead::loss(Tape& tape, Expr context_reps, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != context_reps.value().cols())
    throw std::invalid_argument("seqlab loss: label count mismatch");
  std::vector<double> targets(labels.begin(), labels.end());
  return bce_with_logits(logits(tape, context_reps), targets);
}

std::vector<Parameter*> SeqLabHead::parameters() { return {&w1_, &b1_, &w2_, &b2_}; }

PointerDecoder::PointerDecoder(int ctx_dim, int state_dim, int attn_dim,
                               std::uint64_t seed)
    : ctx_dim_(ctx_dim), state_dim_(state_dim), attn_dim_(attn_dim) {
  if (ctx_dim < 1 || state_dim < 1 || attn_dim < 1)
    throw std::invalid_argument("pointer decoder: bad dimensions");
  std::mt19937_64 rng(seed);
  cell_wx_ = Parameter("ptr.cell.wx", glorot(4 * state_dim, ctx_dim, rng));
  cell_wh_ = Parameter("ptr.cell.wh", glorot(4 * state_dim, state_dim, rng));
  cell_b_ = Parameter("ptr.cell.b", Mat::Zero(4 * state_dim, 1));
  init_w_ = Parameter("ptr.init.w", glorot(state_dim, ctx_dim, rng));
  init_b_ = Parameter("ptr.init.b", Mat::Zero(state_dim, 1));
  start_ = Parameter("ptr.start", glorot(ctx_dim, 1, rng));
  wg1_ = Parameter("ptr.glimpse.w1", glorot(attn_dim, ctx_dim, rng));
  wg2_ = Parameter("ptr.glimpse.w2", glorot(attn_dim, state_dim, rng));
  vg_ = Parameter("ptr.glimpse.v", glorot(attn_dim, 1, rng));
  wp1_ = Parameter("ptr.point.w1", glorot(attn_dim, ctx_dim, rng));
  wp2_ = Parameter("ptr.point.w2", glorot(attn_dim, attn_dim, rng));
  vp_ = Parameter("ptr.point.v", glorot(attn_dim, 1, rng));
}

PointerTrace PointerDecoder::run(Tape& tape, Expr context_reps, int steps,
                                 Mode mode, const std::vector<int>* targets,
                                 const std::string& doc_id, std::mt19937_64* rng) {
  const int n = static_cast<int>(context_reps.value().cols());
  if (steps > n)
    throw std::invalid_argument("pointer decoder: cannot extract more sentences than "
                                "the document has");
  if (context_reps.value().rows() != ctx_dim_)
    throw std::invalid_argument("pointer decoder: context width mismatch");

  PointerTrace trace;
  trace.result.doc_id = doc_id;

  Expr proj_g = matmul(tape.param(wg1_), context_reps);  // attn x n, reused per step
  Expr proj_p = matmul(tape.param(wp1_), context_reps);

  Expr h = tanh_(affine(tape.param(init_w_), mean_cols(context_reps),
                        tape.param(init_b_)));
  Expr c = tape.constant(Mat::Zero(state_dim_, 1));
  Expr input = tape.param(start_);
  std::vector<char> masked(n, 0);

  for (int t = 0; t < steps; ++t) {
    encoders::lstm_step(tape, cell_wx_, cell_wh_, cell_b_, input, h, c);

    // glimpse: e_i = v_g . tanh(Wg1 s_i + Wg2 h), g = sum a_i Wg1 s_i
    Expr gact = tanh_(add_colwise(proj_g, matmul(tape.param(wg2_), h)));
    Expr gscores = transpose(matmul(transpose(tape.param(vg_)), gact));  // n x 1
    Expr gweights = softmax_cols(gscores);
    Expr glimpse = matmul(proj_g, gweights);  // attn x 1

    // pointer: u_i = v_p . tanh(Wp1 s_i + Wp2 g), selected indices masked
    Expr pact = tanh_(add_colwise(proj_p, matmul(tape.param(wp2_), glimpse)));
    Expr uscores = transpose(matmul(transpose(tape.param(vp_)), pact));  // n x 1
    Expr logp = masked_log_softmax_col(uscores, masked);

    std::vector<double> dist(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (!masked[i]) dist[i] = std::exp(logp.value()(i, 0));

    int choice = -1;
    switch (mode) {
      case Mode::kGreedy: {
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
          if (!masked[i] && dist[i] > best) {
            best = dist[i];
            choice = i;
          }
        }
        break;
      }
      case Mode::kSample: {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        double u = unif(*rng);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          if (masked[i]) continue;
          acc += dist[i];
          choice = i;
          if (u <= acc) break;
        }
        break;
      }
      case Mode::kForced:
        choice = (*targets)[t];
        if (choice < 0 || choice >= n)
          throw std::invalid_argument("pointer decoder: target index out of range");
        if (masked[choice])
          throw std::invalid_argument("pointer decoder: repeated target index");
        break;
    }

    trace.result.selected.push_back(choice);
    trace.result.step_scores.push_back(dist[choice]);
    trace.step_logprobs.push_back(pick(logp, choice));
    trace.step_distributions.push_back(std::move(dist));
    masked[choice] = 1;
    input = cols(context_reps, choice, 1);
  }
  return trace;
}

PointerTrace PointerDecoder::decode(Tape& tape, Expr context_reps, int k,
                                    const std::string& doc_id) {
  return run(tape, context_reps, k, Mode::kGreedy, nullptr, doc_id, nullptr);
}

PointerTrace PointerDecoder::sample(Tape& tape, Expr context_reps, int k,
                                    const std::string& doc_id, std::mt19937_64& rng) {
  return run(tape, context_reps, k, Mode::kSample, nullptr, doc_id, &rng);
}

std::vector<Expr> PointerDecoder::stepwise_logprobs(Tape& tape, Expr context_reps,
                                                    const std::vector<int>& target_order) {
  PointerTrace trace = run(tape, context_reps, static_cast<int>(target_order.size()),
                           Mode::kForced, &target_order, "", nullptr);
  return trace.step_logprobs;
}

std::vector<Parameter*> PointerDecoder::parameters() {
  return {&cell_wx_, &cell_wh_, &cell_b_, &init_w_, &init_b_, &start_,
          &wg1_,     &wg2_,     &vg_,     &wp1_,    &wp2_,    &vp_};
}

}  // namespace sumprobe::decoders
