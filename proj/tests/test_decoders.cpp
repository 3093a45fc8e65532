#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "support/oracles.hpp"
#include "sumprobe/decoders.hpp"

using namespace sumprobe;
using nn::Expr;
using nn::Mat;
using nn::Tape;

TEST_CASE("top_k_indices selects by probability, ties to the lower index") {
  CHECK(decoders::top_k_indices({0.1, 0.9, 0.5}, 2) == std::vector<int>{1, 2});
  CHECK(decoders::top_k_indices({0.5, 0.5, 0.1}, 1) == std::vector<int>{0});
  CHECK(decoders::top_k_indices({0.2, 0.3}, 5) == std::vector<int>{0, 1});
  // reported in ascending document order
  CHECK(decoders::top_k_indices({0.9, 0.1, 0.8}, 2) == std::vector<int>{0, 2});
}

TEST_CASE("seqlab head shapes, decode and loss") {
  decoders::SeqLabHead head(6, 5, 0);
  Tape tape;
  Mat ctx = Mat::Random(6, 4);
  Expr logits = head.logits(tape, tape.constant(ctx));
  CHECK(logits.value().rows() == 4);
  CHECK(logits.value().cols() == 1);

  Tape t2;
  ExtractionResult res = head.decode(t2, t2.constant(ctx), 2, "doc");
  CHECK(res.selected.size() == 2);
  CHECK(std::is_sorted(res.selected.begin(), res.selected.end()));
  CHECK(res.step_scores.size() == 2);

  auto build = [&](Tape& t) {
    return head.loss(t, t.constant(ctx), {1, 0, 1, 0});
  };
  CHECK(oracles::gradcheck(head.parameters(), build).max_rel_err < 1e-4);
}

TEST_CASE("pointer decode produces valid distinct indices") {
  decoders::PointerDecoder dec(6, 5, 4, 1);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    int n = std::uniform_int_distribution<int>(1, 8)(rng);
    int k = std::uniform_int_distribution<int>(1, n)(rng);
    Mat ctx = Mat::Random(6, n);
    Tape tape;
    decoders::PointerTrace trace = dec.decode(tape, tape.constant(ctx), k, "d");
    CHECK(static_cast<int>(trace.result.selected.size()) == k);
    std::set<int> uniq(trace.result.selected.begin(), trace.result.selected.end());
    CHECK(static_cast<int>(uniq.size()) == k);
    for (int idx : trace.result.selected) {
      CHECK(idx >= 0);
      CHECK(idx < n);
    }
    for (size_t step = 0; step < trace.step_distributions.size(); ++step) {
      const auto& dist = trace.step_distributions[step];
      double total = 0.0;
      for (double p : dist) total += p;
      CHECK(std::abs(total - 1.0) <= 1e-6);
      // already-selected indices carry zero mass at later steps
      for (size_t prev = 0; prev < step; ++prev)
        CHECK(dist[trace.result.selected[prev]] == 0.0);
    }
  }
}

TEST_CASE("pointer trivial cases") {
  decoders::PointerDecoder dec(4, 4, 4, 3);
  // n=1, k=1: single unmasked candidate, log-probability 0
  Tape tape;
  decoders::PointerTrace one = dec.decode(tape, tape.constant(Mat::Random(4, 1)), 1, "d");
  CHECK(one.result.selected == std::vector<int>{0});
  CHECK(one.step_logprobs[0].scalar() == doctest::Approx(0.0));

  // k=1 equals the argmax of the first-step distribution
  Tape t2;
  decoders::PointerTrace first = dec.decode(t2, t2.constant(Mat::Random(4, 6)), 1, "d");
  const auto& dist = first.step_distributions[0];
  int argmax = static_cast<int>(std::max_element(dist.begin(), dist.end()) -
                                dist.begin());
  CHECK(first.result.selected[0] == argmax);
}

TEST_CASE("pointer teacher forcing validates targets") {
  decoders::PointerDecoder dec(4, 4, 4, 4);
  Mat ctx = Mat::Random(4, 3);
  {
    Tape t;
    CHECK_THROWS(dec.stepwise_logprobs(t, t.constant(ctx), {0, 0}));
  }
  {
    Tape t;
    CHECK_THROWS(dec.stepwise_logprobs(t, t.constant(ctx), {5}));
  }
  {
    Tape t;
    CHECK_THROWS(dec.stepwise_logprobs(t, t.constant(ctx), {0, 1, 2, 0}));
  }
  Tape t;
  auto lps = dec.stepwise_logprobs(t, t.constant(ctx), {2, 0});
  CHECK(lps.size() == 2);
  for (const auto& lp : lps) CHECK(lp.scalar() <= 0.0);
}

TEST_CASE("pointer sampling is seeded and respects the mask") {
  decoders::PointerDecoder dec(4, 4, 4, 5);
  Mat ctx = Mat::Random(4, 5);
  std::mt19937_64 r1(7), r2(7), r3(8);
  Tape ta, tb, tc;
  auto a = dec.sample(ta, ta.constant(ctx), 3, "d", r1);
  auto b = dec.sample(tb, tb.constant(ctx), 3, "d", r2);
  CHECK(a.result.selected == b.result.selected);
  std::set<int> uniq(a.result.selected.begin(), a.result.selected.end());
  CHECK(uniq.size() == 3);
  // a different stream may differ but must stay valid
  auto c = dec.sample(tc, tc.constant(ctx), 3, "d", r3);
  std::set<int> uniq_c(c.result.selected.begin(), c.result.selected.end());
  CHECK(uniq_c.size() == 3);
}

TEST_CASE("gradcheck: pointer teacher-forced loss") {
  decoders::PointerDecoder dec(4, 4, 4, 6);
  Mat ctx = Mat::Random(4, 4);
  auto build = [&](Tape& t) {
    auto lps = dec.stepwise_logprobs(t, t.constant(ctx), {1, 3});
    return nn::scale(nn::add_n({lps[0], lps[1]}), -0.5);
  };
  CHECK(oracles::gradcheck(dec.parameters(), build, 1e-5, 10).max_rel_err < 1e-4);
}
