#include "sumprobe/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "sumprobe/corpus.hpp"

namespace sumprobe::model {

using nn::Expr;
using nn::Mat;
using nn::Tape;

void ModelConfig::validate() const {
  static const std::set<std::string> encoders = {"lstm", "transformer"};
  static const std::set<std::string> decoders = {"seqlab", "pointer", "lead"};
  static const std::set<std::string> sources = {"random", "table", "contextual"};
  if (!encoders.count(encoder))
    throw std::invalid_argument("model config: unknown encoder " + encoder);
  if (!decoders.count(decoder))
    throw std::invalid_argument("model config: unknown decoder " + decoder);
  if (!sources.count(embedding_source))
    throw std::invalid_argument("model config: unknown embedding source " +
                                embedding_source);
  if (is_lead()) return;
  if (sent_dim < 3 || sent_dim % 3 != 0)
    throw std::invalid_argument("model config: sent_dim must be a multiple of 3");
  if (encoder == "transformer") {
    if (sent_dim != doc_width)
      throw std::invalid_argument(
          "model config: transformer requires sent_dim == doc_width");
    if (doc_width % heads != 0)
      throw std::invalid_argument("model config: doc_width must divide by heads");
  } else if (doc_width % 2 != 0) {
    throw std::invalid_argument("model config: lstm doc_width must be even");
  }
  if (alpha < 0 || beta < 0)
    throw std::invalid_argument("model config: alpha/beta must be nonnegative");
  if (layers < 1 || max_sentences < 1 || max_tokens < 1)
    throw std::invalid_argument("model config: bad sizes");
}

std::string to_json_string(const ModelConfig& c) {
  nlohmann::json j;
  j["encoder"] = c.encoder;
  j["decoder"] = c.decoder;
  j["embedding_source"] = c.embedding_source;
  j["embedding_path"] = c.embedding_path;
  j["contextual_store"] = c.contextual_store;
  j["embed_dim"] = c.embed_dim;
  j["sent_dim"] = c.sent_dim;
  j["doc_width"] = c.doc_width;
  j["layers"] = c.layers;
  j["heads"] = c.heads;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["pointer_state_dim"] = c.pointer_state_dim;
  j["attn_dim"] = c.attn_dim;
  j["seqlab_hidden"] = c.seqlab_hidden;
  j["ctx_hidden"] = c.ctx_hidden;
  j["seed"] = c.seed;
  j["max_sentences"] = c.max_sentences;
  j["max_tokens"] = c.max_tokens;
  return j.dump();
}

ModelConfig config_from_json_string(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ModelConfig c;
  c.encoder = j.value("encoder", c.encoder);
  c.decoder = j.value("decoder", c.decoder);
  c.embedding_source = j.value("embedding_source", c.embedding_source);
  c.embedding_path = j.value("embedding_path", c.embedding_path);
  c.contextual_store = j.value("contextual_store", c.contextual_store);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.sent_dim = j.value("sent_dim", c.sent_dim);
  c.doc_width = j.value("doc_width", c.doc_width);
  c.layers = j.value("layers", c.layers);
  c.heads = j.value("heads", c.heads);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.pointer_state_dim = j.value("pointer_state_dim", c.pointer_state_dim);
  c.attn_dim = j.value("attn_dim", c.attn_dim);
  c.seqlab_hidden = j.value("seqlab_hidden", c.seqlab_hidden);
  c.ctx_hidden = j.value("ctx_hidden", c.ctx_hidden);
  c.seed = j.value("seed", c.seed);
  c.max_sentences = j.value("max_sentences", c.max_sentences);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.validate();
  return c;
}

std::vector<int> oracle_target_order(const std::vector<int>& labels, int limit) {
  std::vector<int> order;
  for (int i = 0; i < static_cast<int>(labels.size()) && i < limit; ++i)
    if (labels[i]) order.push_back(i);
  return order;
}

ExtractiveModel::ExtractiveModel(ModelConfig config, std::vector<std::string> vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  if (config_.is_lead()) return;

  int token_dim = config_.embed_dim;
  if (config_.embedding_source == "random") {
    table_ = embeddings::random_table(vocab_, config_.embed_dim, config_.seed);
  } else if (config_.embedding_source == "table") {
    table_ = embeddings::load_table(config_.embedding_path, vocab_);
    token_dim = table_->dim();
    config_.embed_dim = token_dim;
  } else {  // contextual: projection output feeds the CNN
    token_dim = embeddings::ContextualProjection::kOutputDim;
  }

  sentence_encoder_ = std::make_unique<encoders::SentenceEncoderCnn>(
      token_dim, config_.sent_dim, config_.seed + 1);

  encoders::EncoderConfig enc;
  enc.layers = config_.layers;
  enc.width = config_.doc_width;
  enc.heads = config_.heads;
  enc.alpha = config_.alpha;
  enc.beta = config_.beta;
  if (config_.encoder == "lstm") {
    enc.kind = encoders::EncoderConfig::Kind::kRecurrent;
    lstm_encoder_ = std::make_unique<encoders::DocumentEncoderLstm>(
        config_.sent_dim, enc, config_.seed + 2);
  } else {
    enc.kind = encoders::EncoderConfig::Kind::kSelfAttention;
    transformer_encoder_ =
        std::make_unique<encoders::DocumentEncoderTransformer>(enc, config_.seed + 2);
  }

  if (config_.decoder == "seqlab") {
    seqlab_ = std::make_unique<decoders::SeqLabHead>(
        config_.doc_width, config_.seqlab_hidden, config_.seed + 3);
  } else {
    pointer_ = std::make_unique<decoders::PointerDecoder>(
        config_.doc_width, config_.pointer_state_dim, config_.attn_dim,
        config_.seed + 3);
  }
  snap_params_to_f32();
}

void ExtractiveModel::attach_contextual_store(embeddings::ContextualStore store) {
  if (config_.embedding_source != "contextual")
    throw std::logic_error("model does not use a contextual store");
  if (!projection_) {
    projection_.emplace(store.dim, config_.ctx_hidden, config_.seed + 4);
    for (nn::Parameter* p : projection_->parameters())
      for (Eigen::Index i = 0; i < p->value.size(); ++i)
        p->value.data()[i] = static_cast<double>(static_cast<float>(p->value.data()[i]));
  } else if (store.dim != projection_->input_dim()) {
    throw std::invalid_argument("contextual store width mismatch");
  }
  store_ = std::move(store);
}

std::vector<nn::Parameter*> ExtractiveModel::parameters() {
  std::vector<nn::Parameter*> out;
  if (table_ && table_->trainable) out.push_back(&table_->vectors);
  if (projection_) {
    auto p = projection_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (sentence_encoder_) {
    auto p = sentence_encoder_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (lstm_encoder_) {
    auto p = lstm_encoder_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (transformer_encoder_) {
    auto p = transformer_encoder_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (seqlab_) {
    auto p = seqlab_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  if (pointer_) {
    auto p = pointer_->parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

void ExtractiveModel::snap_params_to_f32() {
  for (nn::Parameter* p : parameters())
    for (Eigen::Index i = 0; i < p->value.size(); ++i)
      p->value.data()[i] = static_cast<double>(static_cast<float>(p->value.data()[i]));
}

int ExtractiveModel::effective_sentences(const Document& doc) const {
  return std::min(doc.num_sentences(), config_.max_sentences);
}

Expr ExtractiveModel::sentence_matrix(Tape& tape, const Document& doc) {
  const int n = effective_sentences(doc);
  std::vector<Expr> reps(n);

  if (config_.embedding_source == "contextual") {
    if (!store_) throw std::logic_error("contextual store not attached");
    auto it = store_->records.find(doc.id);
    if (it == store_->records.end())
      throw std::out_of_range("contextual store has no doc: " + doc.id);
    const Mat& rec = it->second;
    long offset = 0;
    for (int i = 0; i < n; ++i) {
      const long len = std::min<long>(
          static_cast<long>(doc.sentences[i].size()), config_.max_tokens);
      Mat toks = Mat::Zero(store_->dim, len);
      // tokens beyond the store's truncation stay zero
      for (long t = 0; t < len; ++t)
        if (offset + t < rec.cols()) toks.col(t) = rec.col(offset + t);
      Expr projected = projection_->apply(tape, tape.constant(std::move(toks)));
      reps[i] = sentence_encoder_->apply(tape, projected);
      offset += static_cast<long>(doc.sentences[i].size());
    }
  } else {
    Expr table_expr = table_->trainable ? tape.param(table_->vectors)
                                        : tape.constant(table_->vectors.value);
    for (int i = 0; i < n; ++i) {
      const auto& sent = doc.sentences[i];
      const int len = std::min<int>(static_cast<int>(sent.size()), config_.max_tokens);
      std::vector<int> ids(len);
      Mat fallback = Mat::Zero(table_->dim(), len);
      bool any_oov = false;
      for (int t = 0; t < len; ++t) {
        ids[t] = table_->row(sent[t]);
        if (ids[t] < 0) {
          fallback.col(t) = embeddings::oov_vector(sent[t], table_->dim());
          any_oov = true;
        }
      }
      Expr embeds = embed_lookup(table_expr, ids, any_oov ? &fallback : nullptr);
      reps[i] = sentence_encoder_->apply(tape, embeds);
    }
  }
  return concat_cols(reps);  // sent_dim x n
}

Expr ExtractiveModel::encode(Tape& tape, const Document& doc) {
  if (config_.is_lead())
    throw std::logic_error("lead model has no encoder");
  Expr sents = sentence_matrix(tape, doc);
  Expr ctx = lstm_encoder_ ? lstm_encoder_->apply(tape, sents)
                           : transformer_encoder_->apply(tape, sents);
  if (!ctx.value().allFinite())
    throw std::runtime_error("encoder produced non-finite values");
  return ctx;
}

ExtractionResult ExtractiveModel::extract(const Document& doc, int k) {
  if (k < 1) throw std::invalid_argument("extract: k must be >= 1");
  if (config_.is_lead()) return corpus::lead_k(doc, k);
  Tape tape;
  Expr ctx = encode(tape, doc);
  const int steps = std::min(k, static_cast<int>(ctx.value().cols()));
  if (seqlab_) return seqlab_->decode(tape, ctx, steps, doc.id);
  return pointer_->decode(tape, ctx, steps, doc.id).result;
}

decoders::PointerTrace ExtractiveModel::sample_extract(Tape& tape, const Document& doc,
                                                       int k, std::mt19937_64& rng) {
  if (!pointer_) throw std::logic_error("sampling requires the pointer decoder");
  Expr ctx = encode(tape, doc);
  const int steps = std::min(k, static_cast<int>(ctx.value().cols()));
  return pointer_->sample(tape, ctx, steps, doc.id, rng);
}

Expr ExtractiveModel::supervised_loss(Tape& tape, const Document& doc) {
  if (!doc.oracle_labels)
    throw std::invalid_argument("supervised loss needs oracle labels: " + doc.id);
  Expr ctx = encode(tape, doc);
  const int n = static_cast<int>(ctx.value().cols());
  if (seqlab_) {
    std::vector<int> labels(doc.oracle_labels->begin(),
                            doc.oracle_labels->begin() + n);
    return seqlab_->loss(tape, ctx, labels);
  }
  std::vector<int> order = oracle_target_order(*doc.oracle_labels, n);
  if (order.empty())
    throw std::invalid_argument("no oracle sentence within truncation: " + doc.id);
  std::vector<Expr> logprobs = pointer_->stepwise_logprobs(tape, ctx, order);
  return scale(neg(add_n(logprobs)), 1.0 / static_cast<double>(logprobs.size()));
}

decoders::PointerDecoder& ExtractiveModel::pointer() {
  if (!pointer_) throw std::logic_error("model has no pointer decoder");
  return *pointer_;
}

decoders::SeqLabHead& ExtractiveModel::seqlab() {
  if (!seqlab_) throw std::logic_error("model has no seqlab head");
  return *seqlab_;
}

}  // namespace sumprobe::model
