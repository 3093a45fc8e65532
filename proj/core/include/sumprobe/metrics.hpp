#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sumprobe/types.hpp"

namespace sumprobe::metrics {

struct RougeOptions {
  bool stem = false;               // Porter-style stemming on both sides
  bool sentence_level_lcs = false; // ROUGE-L per hypothesis sentence instead of
                                   // the concatenated hypothesis stream
};

// ROUGE-1/2 from n-gram multiset overlap, ROUGE-L from LCS with summary-level
// union over reference sentences. Empty hypothesis scores zero everywhere.
RougeScore rouge_scores(const std::vector<Sentence>& hypothesis,
                        const std::vector<Sentence>& reference,
                        const RougeOptions& opts = {});

// Distinct-to-total n-gram ratio over a token stream; 1 means no repetition.
// Throws std::invalid_argument when fewer than n tokens are given.
double repetition_score(const Sentence& tokens, int n);

struct PositionalBias {
  double entropy = 0.0;            // nats
  int buckets = 0;
  int counted = 0;
  int skipped = 0;                 // documents without oracle labels
  std::vector<double> distribution;
};

// Shannon entropy of the bucketed position of each document's first
// oracle-labeled sentence. Documents lacking labels are skipped and counted.
PositionalBias positional_bias(const Corpus& corpus, int buckets = 30);

// Mean token count of the k-th extracted sentence (k is 1-based), over all
// results with at least k selections.
std::map<int, double> length_profile(const std::vector<ExtractionResult>& results,
                                     const Corpus& corpus);

// Arithmetic mean of per-document ROUGE over extraction results.
// Throws std::invalid_argument when a result references an unknown doc id.
RougeScore aggregate_rouge(const std::vector<ExtractionResult>& results,
                           const Corpus& corpus,
                           const RougeOptions& opts = {});

std::string porter_stem(const std::string& word);

}  // namespace sumprobe::metrics
