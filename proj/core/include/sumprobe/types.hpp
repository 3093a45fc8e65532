#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sumprobe {

using Sentence = std::vector<std::string>;

// One article: tokenized lowercased sentences plus its reference summary.
struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::vector<Sentence> reference;
  std::optional<std::vector<int>> oracle_labels;  // 0/1 per sentence
  std::string domain;

  int num_sentences() const { return static_cast<int>(sentences.size()); }
};

struct Corpus {
  std::vector<Document> documents;
  std::map<std::string, std::vector<int>> splits;  // train/valid/test -> doc indices
  std::string domain;

  const std::vector<int>& split(const std::string& name) const;
  bool has_split(const std::string& name) const { return splits.count(name) > 0; }
};

// Ordered extraction: indices in selection order with optional per-step scores.
struct ExtractionResult {
  std::string doc_id;
  std::vector<int> selected;
  std::vector<double> step_scores;
};

struct RougeTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct RougeScore {
  RougeTriple rouge1;
  RougeTriple rouge2;
  RougeTriple rougeL;
};

struct DiagnosticsReport {
  std::map<int, double> rep;             // n-gram order -> REP_n
  double pos_bias = 0.0;                 // nats
  int pos_bias_buckets = 0;
  int pos_bias_skipped = 0;              // docs without labels
  std::map<int, double> length_profile;  // extraction step (1-based) -> mean tokens
  RougeScore rouge;
};

}  // namespace sumprobe
