#pragma once

// Independent re-implementations used as oracles by the test suite. These are
// written against the definitions, not against the library code: explicit
// multiset intersection for n-gram overlap, textbook DP for LCS, and central
// finite differences for gradients.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sumprobe/autograd.hpp"
#include "sumprobe/types.hpp"

namespace oracles {

sumprobe::RougeScore brute_rouge(const std::vector<sumprobe::Sentence>& hyp,
                                 const std::vector<sumprobe::Sentence>& ref);

// Greedy oracle labels recomputed from first principles with brute_rouge.
std::vector<int> brute_greedy_labels(const sumprobe::Document& doc, int max_select);

struct GradCheckResult {
  double max_rel_err = 0.0;
  long checked = 0;
};

// Compares tape gradients against central finite differences. `build` must
// construct the same scalar loss on any fresh tape. At most `max_entries`
// evenly spaced entries per parameter are probed.
GradCheckResult gradcheck(std::vector<sumprobe::nn::Parameter*> params,
                          const std::function<sumprobe::nn::Expr(sumprobe::nn::Tape&)>& build,
                          double h = 1e-5, int max_entries = 24);

// Synthetic corpus where each document hides `salient` sentences drawn from a
// separate sub-vocabulary that also forms the reference, so the selection
// rule is content-detectable. Labels are not attached.
sumprobe::Corpus toy_corpus(int num_docs, std::uint64_t seed, int sentences_per_doc = 6,
                            int tokens_per_sentence = 5, int salient = 2);

std::vector<sumprobe::Sentence> random_sentences(std::mt19937_64& rng, int max_sents,
                                                 int max_len, int vocab);

}  // namespace oracles
