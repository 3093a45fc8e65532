#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sumprobe/types.hpp"

namespace sumprobe::corpus {

// Loads a line-delimited JSON corpus. Each line holds one record with fields
// id, sentences, reference, optional labels, optional domain. Malformed lines
// raise with the 1-based line number in the message.
Corpus load_corpus(const std::string& path, const std::string& domain = "default");

void save_corpus(const Corpus& corpus, const std::string& path);

// Greedy oracle: repeatedly add the sentence maximizing the mean of ROUGE-1
// and ROUGE-2 F1 of the selected set against the reference; stop at the first
// non-improving step or at max_select. Ties break toward the lower index.
std::vector<int> greedy_oracle_labels(const Document& doc, int max_select = 4);

ExtractionResult lead_k(const Document& doc, int k);

// Seeded uniform permutation of the sentences; oracle labels follow the same
// permutation, the reference is untouched.
Document shuffle_sentences(const Document& doc, std::uint64_t seed);

struct DomainStats {
  std::string domain;
  std::map<std::string, int> split_counts;
  int num_documents = 0;
  double mean_sentences = 0.0;
  double mean_reference_sentences = 0.0;
};

DomainStats domain_stats(const Corpus& corpus);

// FNV-1a over the serialized documents; used for report traceability.
std::uint64_t corpus_hash(const Corpus& corpus);

}  // namespace sumprobe::corpus
