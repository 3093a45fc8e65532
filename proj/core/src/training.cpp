#include "sumprobe/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "sumprobe/corpus.hpp"

namespace sumprobe::training {

using nn::Expr;
using nn::Mat;
using nn::Tape;

void TrainConfig::validate() const {
  if (schema != "supervised" && schema != "reinforce")
    throw std::invalid_argument("train config: unknown schema " + schema);
  if (learning_rate <= 0.0)
    throw std::invalid_argument("train config: learning rate must be > 0");
  if (extract_k < 1) throw std::invalid_argument("train config: extract_k must be >= 1");
  if (batch_size < 1 || max_epochs < 0 || patience < 1)
    throw std::invalid_argument("train config: bad sizes");
  if (baseline_decay <= 0.0 || baseline_decay >= 1.0)
    throw std::invalid_argument("train config: baseline decay must be in (0,1)");
}

AdamOptimizer::AdamOptimizer(std::vector<nn::Parameter*> params,
                             double learning_rate, double clip_norm)
    : params_(std::move(params)), lr_(learning_rate), clip_norm_(clip_norm) {
  for (nn::Parameter* p : params_) {
    m_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamOptimizer::step() {
  ++t_;
  double norm_sq = 0.0;
  for (nn::Parameter* p : params_) norm_sq += p->grad.squaredNorm();
  double scale = 1.0;
  if (clip_norm_ > 0.0 && norm_sq > clip_norm_ * clip_norm_)
    scale = clip_norm_ / std::sqrt(norm_sq);
  const double corr1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double corr2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params_.size(); ++i) {
    nn::Parameter* p = params_[i];
    Mat g = scale * p->grad;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    Mat mhat = m_[i] / corr1;
    Mat vhat = v_[i] / corr2;
    p->value -= lr_ * (mhat.array() / (vhat.array().sqrt() + eps_)).matrix();
    for (Eigen::Index k = 0; k < p->value.size(); ++k)
      p->value.data()[k] = static_cast<double>(static_cast<float>(p->value.data()[k]));
    p->zero_grad();
  }
}

double sentence_reward(const Sentence& sentence,
                       const std::vector<Sentence>& reference) {
  return metrics::rouge_scores({sentence}, reference).rouge1.precision;
}

namespace {

std::vector<int> split_or_all(const Corpus& corpus, const std::string& name) {
  if (corpus.has_split(name)) return corpus.split(name);
  std::vector<int> all(corpus.documents.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

struct ParamSnapshot {
  std::vector<Mat> values;
  void capture(std::vector<nn::Parameter*>& params) {
    values.clear();
    for (nn::Parameter* p : params) values.push_back(p->value);
  }
  void restore(std::vector<nn::Parameter*>& params) const {
    for (size_t i = 0; i < params.size(); ++i) params[i]->value = values[i];
  }
};

double validation_r1(model::ExtractiveModel& model, const Corpus& corpus,
                     const std::vector<int>& indices, int extract_k) {
  if (indices.empty()) return 0.0;
  std::vector<ExtractionResult> results;
  for (int i : indices)
    results.push_back(model.extract(corpus.documents[i], extract_k));
  return metrics::aggregate_rouge(results, corpus).rouge1.f1;
}

// schema-agnostic epoch loop with validation early stopping
template <typename LossFn>
TrainResult run_epochs(model::ExtractiveModel& model, const Corpus& corpus,
                       const TrainConfig& cfg, const std::string& schema,
                       double learning_rate, LossFn&& doc_loss) {
  auto params = model.parameters();
  AdamOptimizer opt(params, learning_rate, cfg.clip_norm);
  std::vector<int> train_docs = split_or_all(corpus, "train");
  std::vector<int> valid_docs =
      corpus.has_split("valid") ? corpus.split("valid") : std::vector<int>{};

  TrainResult result;
  result.provenance.schema = schema;
  result.provenance.corpus = corpus.domain;
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(corpus::corpus_hash(corpus)));
  result.provenance.corpus_hash = hash_buf;

  ParamSnapshot best;
  best.capture(params);
  double best_r1 = valid_docs.empty()
                       ? -1.0
                       : validation_r1(model, corpus, valid_docs, cfg.extract_k);
  int best_epoch = 0;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<int> order = train_docs;
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    long counted = 0;
    for (size_t at = 0; at < order.size(); at += cfg.batch_size) {
      const size_t end = std::min(order.size(), at + cfg.batch_size);
      const double inv = 1.0 / static_cast<double>(end - at);
      for (size_t i = at; i < end; ++i) {
        Tape tape;
        Expr loss = doc_loss(tape, corpus.documents[order[i]], rng);
        double value = loss.scalar();
        if (!std::isfinite(value))
          throw std::runtime_error(
              "training diverged: non-finite loss on doc " +
              corpus.documents[order[i]].id + " at epoch " + std::to_string(epoch));
        epoch_loss += value;
        ++counted;
        tape.backward(scale(loss, inv));
      }
      opt.step();
    }
    result.epoch_losses.push_back(counted ? epoch_loss / counted : 0.0);
    result.epochs_run = epoch;

    if (!valid_docs.empty()) {
      double r1 = validation_r1(model, corpus, valid_docs, cfg.extract_k);
      if (r1 > best_r1) {
        best_r1 = r1;
        best.capture(params);
        best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= cfg.patience) {
        result.early_stopped = true;
        break;
      }
    }
  }

  if (!valid_docs.empty()) {
    best.restore(params);
    result.best_validation_r1 = best_r1;
    result.provenance.epoch = best_epoch;
    result.provenance.validation_r1 = best_r1;
  } else {
    result.provenance.epoch = result.epochs_run;
  }
  return result;
}

}  // namespace

TrainResult train_supervised(model::ExtractiveModel& model, const Corpus& corpus,
                             const TrainConfig& cfg) {
  cfg.validate();
  for (int i : split_or_all(corpus, "train"))
    if (!corpus.documents[i].oracle_labels)
      throw std::invalid_argument("train_supervised: document without oracle labels: " +
                                  corpus.documents[i].id);
  return run_epochs(model, corpus, cfg, "supervised", cfg.learning_rate,
                    [&model](Tape& tape, const Document& doc, std::mt19937_64&) {
                      return model.supervised_loss(tape, doc);
                    });
}

TrainResult train_reinforce(model::ExtractiveModel& model, const Corpus& corpus,
                            const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.schema != "reinforce")
    throw std::invalid_argument("train_reinforce: config schema mismatch");
  if (model.config().decoder != "pointer")
    throw std::invalid_argument("train_reinforce: requires the pointer decoder");

  double baseline = 0.0;
  bool baseline_set = false;
  auto loss_fn = [&model, &cfg, &baseline, &baseline_set](
                     Tape& tape, const Document& doc, std::mt19937_64& rng) {
    auto trace = model.sample_extract(tape, doc, cfg.extract_k, rng);
    std::vector<Expr> terms;
    for (size_t t = 0; t < trace.result.selected.size(); ++t) {
      double r = sentence_reward(doc.sentences[trace.result.selected[t]],
                                 doc.reference);
      double advantage = baseline_set ? r - baseline : 0.0;
      if (!baseline_set) {
        baseline = r;
        baseline_set = true;
      } else {
        baseline = cfg.baseline_decay * baseline + (1.0 - cfg.baseline_decay) * r;
      }
      terms.push_back(scale(trace.step_logprobs[t], -advantage));
    }
    return add_n(terms);
  };
  return run_epochs(model, corpus, cfg, "reinforce", cfg.learning_rate, loss_fn);
}

TrainResult fine_tune(model::ExtractiveModel& model, const Corpus& target_corpus,
                      TrainConfig cfg) {
  cfg.schema = "supervised";
  cfg.learning_rate *= 0.5;
  for (int i : split_or_all(target_corpus, "train"))
    if (!target_corpus.documents[i].oracle_labels)
      throw std::invalid_argument("fine_tune: document without oracle labels: " +
                                  target_corpus.documents[i].id);
  cfg.validate();
  return run_epochs(model, target_corpus, cfg, "supervised", cfg.learning_rate,
                    [&model](Tape& tape, const Document& doc, std::mt19937_64&) {
                      return model.supervised_loss(tape, doc);
                    });
}

EvalOutput evaluate(model::ExtractiveModel& model, const Corpus& corpus,
                    int extract_k) {
  EvalOutput out;
  std::vector<int> docs = split_or_all(corpus, "test");
  if (docs.empty()) throw std::invalid_argument("evaluate: empty test split");
  for (int i : docs)
    out.extractions.push_back(model.extract(corpus.documents[i], extract_k));
  out.rouge = metrics::aggregate_rouge(out.extractions, corpus);
  out.diagnostics.rouge = out.rouge;
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& d : corpus.documents) by_id[d.id] = &d;
  for (int n = 1; n <= 3; ++n) {
    double sum = 0.0;
    long counted = 0;
    for (const auto& res : out.extractions) {
      Sentence stream;
      const Document* doc = by_id.at(res.doc_id);
      for (int idx : res.selected)
        stream.insert(stream.end(), doc->sentences[idx].begin(),
                      doc->sentences[idx].end());
      if (static_cast<int>(stream.size()) < n) continue;
      sum += metrics::repetition_score(stream, n);
      ++counted;
    }
    if (counted) out.diagnostics.rep[n] = sum / counted;
  }
  metrics::PositionalBias pb = metrics::positional_bias(corpus);
  out.diagnostics.pos_bias = pb.entropy;
  out.diagnostics.pos_bias_buckets = pb.buckets;
  out.diagnostics.pos_bias_skipped = pb.skipped;
  out.diagnostics.length_profile = metrics::length_profile(out.extractions, corpus);
  return out;
}

}  // namespace sumprobe::training
