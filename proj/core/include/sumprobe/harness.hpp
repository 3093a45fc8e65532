#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sumprobe/model.hpp"
#include "sumprobe/training.hpp"
#include "sumprobe/types.hpp"

namespace sumprobe::harness {

// Per-domain extraction counts used at test time.
int domain_extract_k(const std::string& domain);

struct ExperimentSpec {
  std::string kind = "single";  // single | cross-domain | disentangle | shuffle |
                                // knowledge | rl-stack
  std::string output_dir = "out";
  std::vector<model::ModelConfig> grid;
  training::TrainConfig train;
  std::vector<std::pair<std::string, std::string>> corpora;  // (domain, path)
  std::vector<std::pair<double, double>> disentangle_pairs;
  int shuffle_seeds = 1;
  int buckets = 30;
  bool resume = false;

  void validate() const;
};

// Flat sectioned key-value config: [experiment], [model], [train], [data].
ExperimentSpec load_spec(const std::string& path);

struct Report {
  std::string title;
  std::vector<std::string> columns;  // first column is the row label
  std::vector<std::vector<std::string>> rows;
  bool all_ok = true;
};

std::string render_aligned(const Report& report);
void write_tsv(const Report& report, const std::string& path);

// Traceability record: one line per report value.
struct CellTrace {
  std::string row;
  std::string domain;
  std::string metric;
  double value = 0.0;
  std::string checkpoint;
  std::string corpus_hash;
  bool ok = true;
  std::string error;
};

// Lead, Oracle and every grid model evaluated per domain. Failed cells are
// marked in the report and recorded; the run continues.
Report run_cross_domain(const ExperimentSpec& spec, std::vector<CellTrace>* traces = nullptr);

// One trained transformer row per (alpha, beta) pair.
Report run_disentangle(const ExperimentSpec& spec,
                       const std::vector<std::pair<double, double>>& pairs,
                       std::vector<CellTrace>* traces = nullptr);

// Each grid model trained on the normal and the sentence-shuffled train
// split, both evaluated on the unchanged test split; reports the drop.
Report run_shuffled_training(const ExperimentSpec& spec,
                             std::vector<CellTrace>* traces = nullptr);

// REP_n (n=1..3), positional bias, per-step length profile; also emits
// delimited plot-data files under out_dir when nonempty.
DiagnosticsReport run_diagnostics(const std::vector<ExtractionResult>& extractions,
                                  const Corpus& corpus, int buckets = 30,
                                  const std::string& out_dir = "");

// Dispatches on spec.kind and writes report.txt / report.tsv / cells.tsv
// under spec.output_dir. Returns false when any cell failed.
bool run_experiment(const ExperimentSpec& spec);

std::vector<std::pair<double, double>> default_disentangle_pairs(int width);

// Extraction record files: one JSON object per line (id, selected, scores).
void save_extractions(const std::vector<ExtractionResult>& results,
                      const std::string& path);
std::vector<ExtractionResult> load_extractions(const std::string& path);

}  // namespace sumprobe::harness
