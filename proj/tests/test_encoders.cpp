#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "sumprobe/encoders.hpp"

using namespace sumprobe;
using nn::Expr;
using nn::Mat;
using nn::Tape;

namespace {

encoders::EncoderConfig small_config(encoders::EncoderConfig::Kind kind) {
  encoders::EncoderConfig cfg;
  cfg.kind = kind;
  cfg.layers = 2;
  cfg.width = 8;
  cfg.heads = 2;
  return cfg;
}

Mat permute_cols(const Mat& m, const std::vector<int>& perm) {
  Mat out(m.rows(), m.cols());
  for (size_t i = 0; i < perm.size(); ++i) out.col(static_cast<int>(i)) = m.col(perm[i]);
  return out;
}

}  // namespace

TEST_CASE("sinusoidal positions have unit-range entries and distinct columns") {
  Mat pe = encoders::sinusoidal_positions(10, 8);
  CHECK(pe.rows() == 8);
  CHECK(pe.cols() == 10);
  CHECK(pe.maxCoeff() <= 1.0 + 1e-12);
  CHECK(pe.minCoeff() >= -1.0 - 1e-12);
  CHECK(pe(0, 0) == doctest::Approx(0.0));   // sin(0)
  CHECK(pe(1, 0) == doctest::Approx(1.0));   // cos(0)
  CHECK((pe.col(1) - pe.col(2)).norm() > 1e-6);
}

TEST_CASE("cnn sentence encoder shape, padding and gradcheck") {
  encoders::SentenceEncoderCnn enc(4, 6, 0);
  Tape tape;
  Expr one = enc.apply(tape, tape.constant(Mat::Random(4, 1)));
  CHECK(one.value().rows() == 6);
  CHECK(one.value().cols() == 1);
  Tape t2;
  Expr many = enc.apply(t2, t2.constant(Mat::Random(4, 9)));
  CHECK(many.value().rows() == 6);
  CHECK(many.value().cols() == 1);
  CHECK_THROWS(encoders::SentenceEncoderCnn(4, 7, 0));  // not a multiple of 3

  Mat input = Mat::Random(4, 5);
  auto build = [&](Tape& t) { return mean_all(enc.apply(t, t.constant(input))); };
  CHECK(oracles::gradcheck(enc.parameters(), build).max_rel_err < 1e-4);
}

TEST_CASE("lstm document encoder shape and gradcheck") {
  auto cfg = small_config(encoders::EncoderConfig::Kind::kRecurrent);
  encoders::DocumentEncoderLstm enc(6, cfg, 1);
  Tape tape;
  Expr out = enc.apply(tape, tape.constant(Mat::Random(6, 4)));
  CHECK(out.value().rows() == 8);
  CHECK(out.value().cols() == 4);
  Tape t1;
  Expr single = enc.apply(t1, t1.constant(Mat::Random(6, 1)));
  CHECK(single.value().cols() == 1);

  Mat input = Mat::Random(6, 3);
  auto build = [&](Tape& t) { return mean_all(enc.apply(t, t.constant(input))); };
  CHECK(oracles::gradcheck(enc.parameters(), build).max_rel_err < 1e-4);
}

TEST_CASE("transformer document encoder shape and gradcheck") {
  auto cfg = small_config(encoders::EncoderConfig::Kind::kSelfAttention);
  encoders::DocumentEncoderTransformer enc(cfg, 2);
  Tape tape;
  Expr out = enc.apply(tape, tape.constant(Mat::Random(8, 5)));
  CHECK(out.value().rows() == 8);
  CHECK(out.value().cols() == 5);

  Mat input = Mat::Random(8, 3);
  auto build = [&](Tape& t) { return mean_all(enc.apply(t, t.constant(input))); };
  CHECK(oracles::gradcheck(enc.parameters(), build, 1e-5, 8).max_rel_err < 1e-4);
}

TEST_CASE("transformer with beta=0 is permutation equivariant") {
  auto cfg = small_config(encoders::EncoderConfig::Kind::kSelfAttention);
  cfg.beta = 0.0;
  encoders::DocumentEncoderTransformer enc(cfg, 3);
  std::mt19937_64 rng(5);
  Mat input = Mat::Random(8, 6);
  Tape base_tape;
  Mat base = enc.apply(base_tape, base_tape.constant(input)).value();
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tape tape;
    Mat permuted = enc.apply(tape, tape.constant(permute_cols(input, perm))).value();
    CHECK((permuted - permute_cols(base, perm)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("transformer with alpha=0 is content blind") {
  auto cfg = small_config(encoders::EncoderConfig::Kind::kSelfAttention);
  cfg.alpha = 0.0;
  encoders::DocumentEncoderTransformer enc(cfg, 4);
  Tape ta, tb;
  Mat a = enc.apply(ta, ta.constant(Mat::Random(8, 5))).value();
  Mat b = enc.apply(tb, tb.constant(Mat::Random(8, 5))).value();
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);  // exactly identical
}

TEST_CASE("encoder config validation") {
  encoders::EncoderConfig cfg;
  cfg.width = 7;
  cfg.kind = encoders::EncoderConfig::Kind::kSelfAttention;
  cfg.heads = 2;
  CHECK_THROWS(cfg.validate());  // width not divisible by heads
  cfg.width = 8;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0.0;
  cfg.beta = 0.0;
  CHECK_THROWS(cfg.validate());
  CHECK_NOTHROW(cfg.validate(/*allow_zero_mix=*/true));
}

TEST_CASE("lstm step gradcheck") {
  const int h = 3, x_dim = 2;
  nn::Parameter wx("wx", 0.3 * Mat::Random(4 * h, x_dim));
  nn::Parameter wh("wh", 0.3 * Mat::Random(4 * h, h));
  nn::Parameter b("b", 0.1 * Mat::Random(4 * h, 1));
  Mat x0 = Mat::Random(x_dim, 1), x1 = Mat::Random(x_dim, 1);
  auto build = [&](Tape& t) {
    Expr hh = t.constant(Mat::Zero(h, 1));
    Expr cc = t.constant(Mat::Zero(h, 1));
    encoders::lstm_step(t, wx, wh, b, t.constant(x0), hh, cc);
    encoders::lstm_step(t, wx, wh, b, t.constant(x1), hh, cc);
    return sum_all(cmul(hh, hh));
  };
  CHECK(oracles::gradcheck({&wx, &wh, &b}, build).max_rel_err < 1e-4);
}
