#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sumprobe/autograd.hpp"
#include "sumprobe/types.hpp"

namespace sumprobe::embeddings {

using nn::Mat;

// Context-independent lookup table. Unknown tokens resolve to a deterministic
// uniform [-0.1, 0.1] vector keyed by a stable hash of the token, so lookup
// is total without a shared RNG stream.
struct EmbeddingTable {
  std::unordered_map<std::string, int> vocabulary;  // token -> row
  nn::Parameter vectors;                            // |V| x d
  bool trainable = true;
  int oov_initialized = 0;   // vocab tokens absent from a loaded file
  int duplicate_tokens = 0;  // file tokens seen more than once

  int dim() const { return static_cast<int>(vectors.value.cols()); }
  int row(const std::string& token) const;           // -1 if unknown
  Eigen::VectorXd lookup(const std::string& token) const;
};

Eigen::VectorXd oov_vector(const std::string& token, int dim);

EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim,
                            std::uint64_t seed);

// Whitespace text format: optional "<count> <dim>" header line, then
// "token v1 ... vd". First occurrence of a duplicated token wins.
EmbeddingTable load_table(const std::string& path,
                          const std::vector<std::string>& vocab);

// Precomputed contextual token vectors aligned to corpus tokens.
struct ContextualStore {
  enum class Mode : std::uint8_t { kDocument = 0, kSentence = 1 };
  static constexpr int kTruncationLimit = 512;

  Mode mode = Mode::kDocument;
  int dim = 0;
  std::vector<std::string> doc_order;
  std::unordered_map<std::string, Mat> records;  // id -> dim x tokens

  bool has(const std::string& doc_id) const { return records.count(doc_id) > 0; }
};

ContextualStore load_store(const std::string& path);
void save_store(const ContextualStore& store, const std::string& path);

struct SentenceRep {
  Eigen::VectorXd vector;
  bool truncated = false;  // sentence lies entirely past the truncation limit
};

// Mean pooling of a sentence's token vectors; token offsets come from the
// document's sentence lengths.
SentenceRep sentence_rep_from_store(const ContextualStore& store,
                                    const Document& doc, int sentence_index);

// Two-layer map from the concatenated last-four-layer width down to 128 dims.
struct ContextualProjection {
  static constexpr int kOutputDim = 128;

  nn::Parameter w1, b1, w2, b2;

  ContextualProjection() = default;
  ContextualProjection(int input_dim, int hidden_dim, std::uint64_t seed,
                       int output_dim = kOutputDim);

  int input_dim() const { return static_cast<int>(w1.value.cols()); }
  int output_dim() const { return static_cast<int>(w2.value.rows()); }

  // tokens_in: input_dim x T columns; returns output_dim x T
  nn::Expr apply(nn::Tape& tape, nn::Expr tokens_in);
  std::vector<nn::Parameter*> parameters();
};

}  // namespace sumprobe::embeddings
