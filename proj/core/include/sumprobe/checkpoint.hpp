#pragma once

#include <memory>
#include <string>

#include "sumprobe/model.hpp"

namespace sumprobe::checkpoint {

struct Provenance {
  std::string corpus;
  std::string corpus_hash;
  std::string schema;  // supervised | reinforce | none
  int epoch = 0;
  double validation_r1 = 0.0;
};

// Single archive: magic, JSON manifest (config, vocab, provenance), then
// named tensors as 32-bit little-endian floats. Parameters are float32
// quantized in memory, so the round-trip is bitwise lossless.
void save_checkpoint(const std::string& path, model::ExtractiveModel& model,
                     const Provenance& provenance);

struct Loaded {
  model::ModelConfig config;
  Provenance provenance;
  std::unique_ptr<model::ExtractiveModel> model;
};

// Rebuilds the model from the stored config and vocabulary; throws on any
// missing tensor or shape mismatch. Contextual stores are reattached by the
// caller from config.contextual_store.
Loaded load_checkpoint(const std::string& path);

}  // namespace sumprobe::checkpoint
