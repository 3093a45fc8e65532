#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sumprobe/decoders.hpp"
#include "sumprobe/embeddings.hpp"
#include "sumprobe/encoders.hpp"
#include "sumprobe/types.hpp"

namespace sumprobe::model {

struct ModelConfig {
  std::string encoder = "lstm";             // lstm | transformer
  std::string decoder = "pointer";          // seqlab | pointer | lead
  std::string embedding_source = "random";  // random | table | contextual
  std::string embedding_path;               // text table when source == table
  std::string contextual_store;             // store path when source == contextual

  int embed_dim = 48;
  int sent_dim = 48;   // CNN output, multiple of 3
  int doc_width = 48;  // d_c; must equal sent_dim for the transformer
  int layers = 2;
  int heads = 8;
  double alpha = 1.0;
  double beta = 1.0;
  int pointer_state_dim = 48;
  int attn_dim = 48;
  int seqlab_hidden = 48;
  int ctx_hidden = 512;  // contextual projection hidden width
  std::uint64_t seed = 0;

  int max_sentences = 50;  // modeling truncation
  int max_tokens = 100;    // per sentence

  void validate() const;
  bool is_lead() const { return decoder == "lead"; }
};

std::string to_json_string(const ModelConfig& cfg);
ModelConfig config_from_json_string(const std::string& json_text);

// A full encoder/decoder combination over one embedding source.
class ExtractiveModel {
 public:
  ExtractiveModel(ModelConfig config, std::vector<std::string> vocab);

  const ModelConfig& config() const { return config_; }
  const std::vector<std::string>& vocab() const { return vocab_; }

  void attach_contextual_store(embeddings::ContextualStore store);
  bool has_contextual_store() const { return store_.has_value(); }

  std::vector<nn::Parameter*> parameters();
  // Quantizes parameter values to float32-representable doubles so the
  // 32-bit checkpoint format round-trips bitwise.
  void snap_params_to_f32();

  // Number of sentences visible to the model after truncation.
  int effective_sentences(const Document& doc) const;

  // Contextualized sentence representations, doc_width x n_eff.
  nn::Expr encode(nn::Tape& tape, const Document& doc);

  // Greedy extraction of min(k, n_eff) sentences.
  ExtractionResult extract(const Document& doc, int k);

  // Pointer sampling trace for RL; requires decoder == pointer.
  decoders::PointerTrace sample_extract(nn::Tape& tape, const Document& doc, int k,
                                        std::mt19937_64& rng);

  // Supervised loss: mean BCE for seqlab, mean negative stepwise log
  // probability of the oracle order (ascending position) for pointer.
  nn::Expr supervised_loss(nn::Tape& tape, const Document& doc);

  decoders::PointerDecoder& pointer();
  decoders::SeqLabHead& seqlab();

 private:
  nn::Expr sentence_matrix(nn::Tape& tape, const Document& doc);

  ModelConfig config_;
  std::vector<std::string> vocab_;
  std::optional<embeddings::EmbeddingTable> table_;
  std::optional<embeddings::ContextualStore> store_;
  std::optional<embeddings::ContextualProjection> projection_;
  std::unique_ptr<encoders::SentenceEncoderCnn> sentence_encoder_;
  std::unique_ptr<encoders::DocumentEncoderLstm> lstm_encoder_;
  std::unique_ptr<encoders::DocumentEncoderTransformer> transformer_encoder_;
  std::unique_ptr<decoders::SeqLabHead> seqlab_;
  std::unique_ptr<decoders::PointerDecoder> pointer_;
};

// Oracle sentences in ascending document position, for teacher forcing.
std::vector<int> oracle_target_order(const std::vector<int>& labels, int limit);

}  // namespace sumprobe::model
