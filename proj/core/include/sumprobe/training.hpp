#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sumprobe/checkpoint.hpp"
#include "sumprobe/metrics.hpp"
#include "sumprobe/model.hpp"
#include "sumprobe/types.hpp"

namespace sumprobe::training {

struct TrainConfig {
  std::string schema = "supervised";  // supervised | reinforce
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 10;
  double clip_norm = 2.0;
  std::uint64_t seed = 0;
  int extract_k = 3;
  int patience = 3;              // validation R-1 early stop
  double baseline_decay = 0.99;  // EMA reward baseline for reinforce

  void validate() const;
};

class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<nn::Parameter*> params, double learning_rate,
                double clip_norm);

  void set_learning_rate(double lr) { lr_ = lr; }
  // Applies one update from the accumulated gradients, zeroes them, and
  // quantizes values to float32-representable doubles.
  void step();

 private:
  std::vector<nn::Parameter*> params_;
  std::vector<nn::Mat> m_, v_;
  double lr_;
  double clip_norm_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long t_ = 0;
};

struct TrainResult {
  checkpoint::Provenance provenance;
  std::vector<double> epoch_losses;
  double best_validation_r1 = 0.0;
  int epochs_run = 0;
  bool early_stopped = false;
};

// Cross-entropy training: BCE against oracle flags for seqlab, negative
// stepwise log-probability of the oracle order for pointer. Documents must
// carry oracle labels. Non-finite loss aborts with a diagnostic.
TrainResult train_supervised(model::ExtractiveModel& model, const Corpus& corpus,
                             const TrainConfig& cfg);

// REINFORCE over sampled pointer extractions; per-step reward is the ROUGE-1
// precision of the selected sentence against the reference, with an
// exponential-moving-average baseline. The model is the warm start.
TrainResult train_reinforce(model::ExtractiveModel& model, const Corpus& corpus,
                            const TrainConfig& cfg);

// Continues supervised training at half the configured learning rate.
TrainResult fine_tune(model::ExtractiveModel& model, const Corpus& target_corpus,
                      TrainConfig cfg);

struct EvalOutput {
  RougeScore rouge;
  DiagnosticsReport diagnostics;
  std::vector<ExtractionResult> extractions;
};

// Greedy decoding of min(k, n) sentences per document over the test split
// (all documents when no split is defined), with aggregate metrics.
EvalOutput evaluate(model::ExtractiveModel& model, const Corpus& corpus,
                    int extract_k);

double sentence_reward(const Sentence& sentence, const std::vector<Sentence>& reference);

}  // namespace sumprobe::training
