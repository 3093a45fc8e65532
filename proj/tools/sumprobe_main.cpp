// sumprobe: extractive summarization testbed CLI.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sumprobe/checkpoint.hpp"
#include "sumprobe/corpus.hpp"
#include "sumprobe/embeddings.hpp"
#include "sumprobe/harness.hpp"
#include "sumprobe/metrics.hpp"
#include "sumprobe/model.hpp"
#include "sumprobe/training.hpp"

using namespace sumprobe;

namespace {

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<Sentence> parse_sentence_list(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  return j.get<std::vector<Sentence>>();
}

std::vector<Sentence> read_sentence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sentence_list(ss.str());
}

void print_rouge(const RougeScore& s) {
  std::cout << "metric\tP\tR\tF1\n";
  std::cout << "rouge-1\t" << fmt4(s.rouge1.precision) << '\t' << fmt4(s.rouge1.recall)
            << '\t' << fmt4(s.rouge1.f1) << '\n';
  std::cout << "rouge-2\t" << fmt4(s.rouge2.precision) << '\t' << fmt4(s.rouge2.recall)
            << '\t' << fmt4(s.rouge2.f1) << '\n';
  std::cout << "rouge-l\t" << fmt4(s.rougeL.precision) << '\t' << fmt4(s.rougeL.recall)
            << '\t' << fmt4(s.rougeL.f1) << '\n';
}

int cmd_corpus_stats(const std::string& in_path) {
  Corpus corpus = corpus::load_corpus(in_path);
  corpus::DomainStats stats = corpus::domain_stats(corpus);
  std::cout << "documents\t" << stats.num_documents << '\n';
  std::cout << "mean_sentences\t" << fmt4(stats.mean_sentences) << '\n';
  long sentences = 0, tokens = 0, labeled = 0;
  for (const auto& doc : corpus.documents) {
    sentences += static_cast<long>(doc.sentences.size());
    for (const auto& s : doc.sentences) tokens += static_cast<long>(s.size());
    if (doc.oracle_labels) ++labeled;
  }
  std::cout << "mean_tokens_per_sentence\t"
            << fmt4(sentences ? static_cast<double>(tokens) / sentences : 0.0) << '\n';
  std::cout << "mean_reference_sentences\t" << fmt4(stats.mean_reference_sentences)
            << '\n';
  std::cout << "labeled_fraction\t"
            << fmt4(corpus.documents.empty()
                        ? 0.0
                        : static_cast<double>(labeled) / corpus.documents.size())
            << '\n';
  for (const auto& [name, count] : stats.split_counts)
    std::cout << "split_" << name << '\t' << count << '\n';
  metrics::PositionalBias pb = metrics::positional_bias(corpus);
  std::cout << "positional_bias\t" << fmt4(pb.entropy) << '\n';
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(corpus::corpus_hash(corpus)));
  std::cout << "hash\t" << buf << '\n';
  return 0;
}

int cmd_corpus_oracle(const std::string& in_path, const std::string& out_path,
                      int max_select) {
  Corpus corpus = corpus::load_corpus(in_path);
  int labeled = 0;
  for (auto& doc : corpus.documents) {
    doc.oracle_labels = corpus::greedy_oracle_labels(doc, max_select);
    ++labeled;
  }
  corpus::save_corpus(corpus, out_path);
  std::cout << "labeled\t" << labeled << '\n';
  return 0;
}

int cmd_corpus_shuffle(const std::string& in_path, const std::string& out_path,
                       std::uint64_t seed) {
  Corpus corpus = corpus::load_corpus(in_path);
  for (size_t i = 0; i < corpus.documents.size(); ++i)
    corpus.documents[i] = corpus::shuffle_sentences(
        corpus.documents[i], seed + static_cast<std::uint64_t>(i));
  corpus::save_corpus(corpus, out_path);
  std::cout << "shuffled\t" << corpus.documents.size() << '\n';
  return 0;
}

int cmd_score(const std::string& hyp, const std::string& ref, bool stem,
              bool from_files) {
  metrics::RougeOptions opts;
  opts.stem = stem;
  auto h = from_files ? read_sentence_file(hyp) : parse_sentence_list(hyp);
  auto r = from_files ? read_sentence_file(ref) : parse_sentence_list(ref);
  print_rouge(metrics::rouge_scores(h, r, opts));
  return 0;
}

int cmd_diagnose(const std::string& extractions_path, const std::string& corpus_path,
                 int buckets, const std::string& out_dir) {
  Corpus corpus = corpus::load_corpus(corpus_path);
  auto extractions = harness::load_extractions(extractions_path);
  DiagnosticsReport rep =
      harness::run_diagnostics(extractions, corpus, buckets, out_dir);
  for (const auto& [n, v] : rep.rep) std::cout << "rep_" << n << '\t' << fmt4(v) << '\n';
  std::cout << "pos_bias\t" << fmt4(rep.pos_bias) << '\n';
  std::cout << "pos_bias_buckets\t" << rep.pos_bias_buckets << '\n';
  std::cout << "pos_bias_skipped\t" << rep.pos_bias_skipped << '\n';
  for (const auto& [k, v] : rep.length_profile)
    std::cout << "length_step_" << k << '\t' << fmt4(v) << '\n';
  print_rouge(rep.rouge);
  return 0;
}

int cmd_embed_inspect(const std::string& store_path) {
  embeddings::ContextualStore store = embeddings::load_store(store_path);
  std::cout << "mode\t" << (store.mode == embeddings::ContextualStore::Mode::kDocument ? "document"
                                                                      : "sentence")
            << '\n';
  std::cout << "dim\t" << store.dim << '\n';
  std::cout << "documents\t" << store.doc_order.size() << '\n';
  long total_tokens = 0;
  long truncated = 0;
  for (const auto& id : store.doc_order) {
    const auto& mat = store.records.at(id);
    total_tokens += mat.cols();
    if (mat.cols() == embeddings::ContextualStore::kTruncationLimit) ++truncated;
  }
  std::cout << "total_tokens\t" << total_tokens << '\n';
  std::cout << "at_truncation_limit\t" << truncated << '\n';
  return 0;
}

int cmd_embed_validate(const std::string& store_path, const std::string& corpus_path) {
  embeddings::ContextualStore store = embeddings::load_store(store_path);
  Corpus corpus = corpus::load_corpus(corpus_path);
  int missing = 0, mismatched = 0;
  for (const auto& doc : corpus.documents) {
    auto it = store.records.find(doc.id);
    if (it == store.records.end()) {
      ++missing;
      continue;
    }
    long doc_tokens = 0;
    for (const auto& s : doc.sentences) doc_tokens += static_cast<long>(s.size());
    long expect = std::min<long>(doc_tokens,
                                 embeddings::ContextualStore::kTruncationLimit);
    if (it->second.cols() != expect) ++mismatched;
  }
  std::cout << "missing\t" << missing << '\n';
  std::cout << "length_mismatch\t" << mismatched << '\n';
  std::cout << (missing == 0 && mismatched == 0 ? "ok" : "invalid") << '\n';
  return missing == 0 && mismatched == 0 ? 0 : 1;
}

int cmd_train(const std::string& config_path) {
  harness::ExperimentSpec spec = harness::load_spec(config_path);
  if (spec.grid.size() != 1)
    throw std::runtime_error("train: config must describe exactly one model");
  const auto& [domain, path] = spec.corpora.front();
  Corpus corpus = corpus::load_corpus(path, domain);
  for (auto& doc : corpus.documents)
    if (!doc.oracle_labels) doc.oracle_labels = corpus::greedy_oracle_labels(doc);

  model::ModelConfig cfg = spec.grid.front();
  std::set<std::string> vocab_set;
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences) vocab_set.insert(s.begin(), s.end());
  model::ExtractiveModel m(cfg, {vocab_set.begin(), vocab_set.end()});
  if (cfg.embedding_source == "contextual")
    m.attach_contextual_store(embeddings::load_store(cfg.contextual_store));

  training::TrainResult res = spec.train.schema == "reinforce"
                                  ? training::train_reinforce(m, corpus, spec.train)
                                  : training::train_supervised(m, corpus, spec.train);
  std::filesystem::create_directories(spec.output_dir);
  std::string ckpt = spec.output_dir + "/checkpoint.bin";
  checkpoint::save_checkpoint(ckpt, m, res.provenance);
  std::cout << "epochs_run\t" << res.epochs_run << '\n';
  std::cout << "early_stopped\t" << (res.early_stopped ? 1 : 0) << '\n';
  for (size_t i = 0; i < res.epoch_losses.size(); ++i)
    std::cout << "epoch_" << (i + 1) << "_loss\t" << fmt4(res.epoch_losses[i]) << '\n';
  if (res.best_validation_r1 > 0.0)
    std::cout << "best_validation_r1\t" << fmt4(res.best_validation_r1) << '\n';
  std::cout << "checkpoint\t" << ckpt << '\n';
  return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& corpus_path, int k,
                 const std::string& extractions_out) {
  checkpoint::Loaded loaded = checkpoint::load_checkpoint(ckpt_path);
  Corpus corpus = corpus::load_corpus(corpus_path);
  training::EvalOutput out = training::evaluate(*loaded.model, corpus, k);
  if (!extractions_out.empty())
    harness::save_extractions(out.extractions, extractions_out);
  print_rouge(out.rouge);
  for (const auto& [n, v] : out.diagnostics.rep)
    std::cout << "rep_" << n << '\t' << fmt4(v) << '\n';
  std::cout << "pos_bias\t" << fmt4(out.diagnostics.pos_bias) << '\n';
  return 0;
}

int cmd_run(const std::string& config_path, bool resume) {
  harness::ExperimentSpec spec = harness::load_spec(config_path);
  spec.resume = resume;
  bool ok = harness::run_experiment(spec);
  std::ifstream report(spec.output_dir + "/report.txt");
  std::cout << report.rdbuf();
  return ok ? 0 : 1;
}

int cmd_report(const std::string& dir) {
  std::ifstream report(dir + "/report.txt");
  if (!report) throw std::runtime_error("no report.txt under " + dir);
  std::cout << report.rdbuf();
  std::ifstream cells(dir + "/cells.tsv");
  if (cells) {
    std::cout << "\n# cells\n";
    std::cout << cells.rdbuf();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"extractive summarization testbed"};
  app.require_subcommand(1);

  std::string in_path, out_path, hyp, ref, corpus_path, store_path, config_path;
  std::string ckpt_path, extractions_path, out_dir, report_dir;
  int max_select = 4, buckets = 30, extract_k = 3;
  std::uint64_t seed = 0;
  bool stem = false, from_files = false, resume = false;

  auto* corpus_cmd = app.add_subcommand("corpus", "corpus inspection and labeling");
  corpus_cmd->require_subcommand(1);
  auto* stats = corpus_cmd->add_subcommand("stats", "summary statistics");
  stats->add_option("--in", in_path, "corpus jsonl")->required();
  auto* oracle = corpus_cmd->add_subcommand("oracle", "attach greedy oracle labels");
  oracle->add_option("--in", in_path, "corpus jsonl")->required();
  oracle->add_option("--out", out_path, "output jsonl")->required();
  oracle->add_option("--max-select", max_select, "oracle budget");
  auto* shuffle = corpus_cmd->add_subcommand("shuffle", "shuffle sentence order");
  shuffle->add_option("--in", in_path, "corpus jsonl")->required();
  shuffle->add_option("--out", out_path, "output jsonl")->required();
  shuffle->add_option("--seed", seed, "rng seed");

  auto* score = app.add_subcommand("score", "rouge for one hypothesis/reference pair");
  score->add_option("--hyp", hyp, "hypothesis (json list of token lists)")->required();
  score->add_option("--ref", ref, "reference (json list of token lists)")->required();
  score->add_flag("--stem", stem, "porter stemming");
  score->add_flag("--files", from_files, "treat --hyp/--ref as file paths");

  auto* diagnose = app.add_subcommand("diagnose", "repetition / position diagnostics");
  diagnose->add_option("--extractions", extractions_path, "extraction jsonl")
      ->required();
  diagnose->add_option("--corpus", corpus_path, "corpus jsonl")->required();
  diagnose->add_option("--buckets", buckets, "positional bias buckets");
  diagnose->add_option("--out-dir", out_dir, "plot-data output directory");

  auto* embed = app.add_subcommand("embed", "contextual store utilities");
  embed->require_subcommand(1);
  auto* inspect = embed->add_subcommand("inspect", "store header and sizes");
  inspect->add_option("--store", store_path, "store file")->required();
  auto* validate = embed->add_subcommand("validate", "check store against a corpus");
  validate->add_option("--store", store_path, "store file")->required();
  validate->add_option("--corpus", corpus_path, "corpus jsonl")->required();

  auto* train = app.add_subcommand("train", "train one model from a config");
  train->add_option("--config", config_path, "experiment config")->required();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint");
  evaluate->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  evaluate->add_option("--corpus", corpus_path, "corpus jsonl")->required();
  evaluate->add_option("--k", extract_k, "sentences per document");
  evaluate->add_option("--extractions", out_path, "write extraction jsonl here");

  auto* run = app.add_subcommand("run", "run a full experiment grid");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_flag("--resume", resume, "reuse finished cells");

  auto* report = app.add_subcommand("report", "print a finished experiment report");
  report->add_option("--dir", report_dir, "experiment output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) return cmd_corpus_stats(in_path);
    if (oracle->parsed()) return cmd_corpus_oracle(in_path, out_path, max_select);
    if (shuffle->parsed()) return cmd_corpus_shuffle(in_path, out_path, seed);
    if (score->parsed()) return cmd_score(hyp, ref, stem, from_files);
    if (diagnose->parsed())
      return cmd_diagnose(extractions_path, corpus_path, buckets, out_dir);
    if (inspect->parsed()) return cmd_embed_inspect(store_path);
    if (validate->parsed()) return cmd_embed_validate(store_path, corpus_path);
    if (train->parsed()) return cmd_train(config_path);
    if (evaluate->parsed())
      return cmd_evaluate(ckpt_path, corpus_path, extract_k, out_path);
    if (run->parsed()) return cmd_run(config_path, resume);
    if (report->parsed()) return cmd_report(report_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
