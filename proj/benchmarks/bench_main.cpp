#include <benchmark/benchmark.h>

#include <random>

#include "sumprobe/corpus.hpp"
#include "sumprobe/decoders.hpp"
#include "sumprobe/metrics.hpp"

using namespace sumprobe;

namespace {

std::vector<Sentence> random_sents(std::mt19937_64& rng, int sents, int len,
                                   int vocab) {
  std::uniform_int_distribution<int> tok(0, vocab - 1);
  std::vector<Sentence> out(sents);
  for (auto& s : out) {
    s.resize(len);
    for (auto& t : s) t = "w" + std::to_string(tok(rng));
  }
  return out;
}

void BM_RougeScores(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto hyp = random_sents(rng, 3, 25, 500);
  auto ref = random_sents(rng, 4, 20, 500);
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::rouge_scores(hyp, ref));
}
BENCHMARK(BM_RougeScores);

void BM_GreedyOracle(benchmark::State& state) {
  std::mt19937_64 rng(2);
  Document doc;
  doc.id = "bench";
  doc.sentences = random_sents(rng, static_cast<int>(state.range(0)), 20, 200);
  doc.reference = random_sents(rng, 3, 15, 200);
  for (auto _ : state)
    benchmark::DoNotOptimize(corpus::greedy_oracle_labels(doc));
}
BENCHMARK(BM_GreedyOracle)->Arg(10)->Arg(30);

void BM_PointerDecode(benchmark::State& state) {
  decoders::PointerDecoder dec(32, 32, 32, 3);
  nn::Mat ctx = nn::Mat::Random(32, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    nn::Tape tape;
    benchmark::DoNotOptimize(dec.decode(tape, tape.constant(ctx), 3, "d"));
  }
}
BENCHMARK(BM_PointerDecode)->Arg(10)->Arg(50);

void BM_RepetitionScore(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> tok(0, 50);
  Sentence stream(300);
  for (auto& t : stream) t = "t" + std::to_string(tok(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(metrics::repetition_score(stream, 2));
}
BENCHMARK(BM_RepetitionScore);

}  // namespace

BENCHMARK_MAIN();
