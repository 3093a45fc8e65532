#include "sumprobe/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sumprobe/corpus.hpp"
#include "sumprobe/checkpoint.hpp"
#include "sumprobe/metrics.hpp"

namespace fs = std::filesystem;

namespace sumprobe::harness {

namespace {

std::string normalize_domain(const std::string& name) {
  std::string out;
  for (char c : name)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string hash_string(const Corpus& corpus) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(corpus::corpus_hash(corpus)));
  return buf;
}

std::vector<std::string> build_vocab(const Corpus& corpus) {
  std::set<std::string> seen;
  const std::vector<int>* train = nullptr;
  std::vector<int> all;
  if (corpus.has_split("train")) {
    train = &corpus.split("train");
  } else {
    all.resize(corpus.documents.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    train = &all;
  }
  for (int i : *train)
    for (const auto& sent : corpus.documents[i].sentences)
      for (const auto& tok : sent) seen.insert(tok);
  return {seen.begin(), seen.end()};
}

void ensure_oracle_labels(Corpus& corpus) {
  for (auto& doc : corpus.documents)
    if (!doc.oracle_labels)
      doc.oracle_labels = corpus::greedy_oracle_labels(doc);
}

std::vector<int> test_split(const Corpus& corpus) {
  if (corpus.has_split("test")) return corpus.split("test");
  std::vector<int> all(corpus.documents.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  return all;
}

RougeScore baseline_rouge(const Corpus& corpus, int k, bool oracle,
                          std::vector<ExtractionResult>* out_results = nullptr) {
  std::vector<ExtractionResult> results;
  for (int i : test_split(corpus)) {
    const Document& doc = corpus.documents[i];
    if (oracle) {
      ExtractionResult res;
      res.doc_id = doc.id;
      const auto& labels = *doc.oracle_labels;
      for (size_t j = 0; j < labels.size(); ++j)
        if (labels[j]) res.selected.push_back(static_cast<int>(j));
      results.push_back(std::move(res));
    } else {
      results.push_back(corpus::lead_k(doc, k));
    }
  }
  RougeScore score = metrics::aggregate_rouge(results, corpus);
  if (out_results) *out_results = std::move(results);
  return score;
}

std::string cell_name(const model::ModelConfig& cfg) {
  std::string name = cfg.encoder + "-" + cfg.decoder;
  if (cfg.embedding_source != "random") name += "-" + cfg.embedding_source;
  return name;
}

void write_cell_metrics(const std::string& path, const RougeScore& s) {
  std::ofstream out(path);
  out << "r1_p\t" << fmt4(s.rouge1.precision) << "\n"
      << "r1_r\t" << fmt4(s.rouge1.recall) << "\n"
      << "r1_f1\t" << fmt4(s.rouge1.f1) << "\n"
      << "r2_p\t" << fmt4(s.rouge2.precision) << "\n"
      << "r2_r\t" << fmt4(s.rouge2.recall) << "\n"
      << "r2_f1\t" << fmt4(s.rouge2.f1) << "\n"
      << "rl_p\t" << fmt4(s.rougeL.precision) << "\n"
      << "rl_r\t" << fmt4(s.rougeL.recall) << "\n"
      << "rl_f1\t" << fmt4(s.rougeL.f1) << "\n";
}

bool read_cell_metrics(const std::string& path, RougeScore* s) {
  std::ifstream in(path);
  if (!in) return false;
  std::map<std::string, double> kv;
  std::string name;
  double value;
  while (in >> name >> value) kv[name] = value;
  if (!kv.count("r1_f1")) return false;
  s->rouge1 = {kv["r1_p"], kv["r1_r"], kv["r1_f1"]};
  s->rouge2 = {kv["r2_p"], kv["r2_r"], kv["r2_f1"]};
  s->rougeL = {kv["rl_p"], kv["rl_r"], kv["rl_f1"]};
  return true;
}

// Trains one grid model on the corpus and evaluates it on the test split.
// Outputs (checkpoint, extractions, metrics) land in cell_dir when nonempty.
RougeScore run_cell(const ExperimentSpec& spec, model::ModelConfig cfg,
                    Corpus& corpus, int k, const std::string& cell_dir,
                    std::string* checkpoint_path) {
  if (!cell_dir.empty()) fs::create_directories(cell_dir);
  const std::string metrics_path = cell_dir.empty() ? "" : cell_dir + "/metrics.tsv";
  RougeScore cached;
  if (spec.resume && !metrics_path.empty() && read_cell_metrics(metrics_path, &cached)) {
    if (checkpoint_path) *checkpoint_path = cell_dir + "/checkpoint.bin";
    return cached;
  }

  model::ExtractiveModel m(cfg, build_vocab(corpus));
  if (cfg.embedding_source == "contextual")
    m.attach_contextual_store(embeddings::load_store(cfg.contextual_store));

  training::TrainConfig tcfg = spec.train;
  tcfg.extract_k = k;
  if (!cfg.is_lead()) {
    if (tcfg.schema == "reinforce" || spec.kind == "rl-stack") {
      training::TrainConfig sup = tcfg;
      sup.schema = "supervised";
      training::train_supervised(m, corpus, sup);
      training::TrainConfig rl = tcfg;
      rl.schema = "reinforce";
      rl.learning_rate = std::min(tcfg.learning_rate, 1e-4);
      training::train_reinforce(m, corpus, rl);
    } else {
      training::train_supervised(m, corpus, tcfg);
    }
  }

  training::EvalOutput eval = training::evaluate(m, corpus, k);
  if (!cell_dir.empty()) {
    checkpoint::Provenance prov;
    prov.corpus = corpus.domain;
    prov.corpus_hash = hash_string(corpus);
    prov.schema = cfg.is_lead() ? "none" : tcfg.schema;
    std::string ckpt = cell_dir + "/checkpoint.bin";
    if (!cfg.is_lead()) checkpoint::save_checkpoint(ckpt, m, prov);
    save_extractions(eval.extractions, cell_dir + "/extractions.jsonl");
    write_cell_metrics(metrics_path, eval.rouge);
    if (checkpoint_path) *checkpoint_path = cfg.is_lead() ? "" : ckpt;
  }
  return eval.rouge;
}

void push_trace(std::vector<CellTrace>* traces, const std::string& row,
                const std::string& domain, const RougeScore& s,
                const std::string& ckpt, const std::string& hash) {
  if (!traces) return;
  traces->push_back({row, domain, "r1_f1", s.rouge1.f1, ckpt, hash, true, ""});
  traces->push_back({row, domain, "r2_f1", s.rouge2.f1, ckpt, hash, true, ""});
  traces->push_back({row, domain, "rl_f1", s.rougeL.f1, ckpt, hash, true, ""});
}

}  // namespace

int domain_extract_k(const std::string& domain) {
  static const std::map<std::string, int> registry = {
      {"cnndailymail", 3}, {"cnndm", 3}, {"nytimes", 2}};
  auto it = registry.find(normalize_domain(domain));
  return it == registry.end() ? 1 : it->second;
}

void ExperimentSpec::validate() const {
  static const std::set<std::string> kinds = {"single",  "cross-domain", "disentangle",
                                              "shuffle", "knowledge",    "rl-stack"};
  if (!kinds.count(kind))
    throw std::invalid_argument("experiment: unknown kind " + kind);
  if (corpora.empty())
    throw std::invalid_argument("experiment: no corpora configured");
  if (output_dir.empty())
    throw std::invalid_argument("experiment: output_dir required");
  for (const auto& [domain, path] : corpora)
    if (!fs::exists(path))
      throw std::invalid_argument("experiment: corpus file missing: " + path);
  train.validate();
  for (const auto& cfg : grid) cfg.validate();
}

std::vector<std::pair<double, double>> default_disentangle_pairs(int width) {
  const double sqrt_d = std::sqrt(static_cast<double>(width));
  return {{1, 0}, {sqrt_d, 1}, {1, 1}, {1, sqrt_d}, {0, 1}};
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open experiment config: " + path);
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line, section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string text = line.substr(first, last - first + 1);
    if (text[0] == '#' || text[0] == ';') continue;
    if (text.front() == '[' && text.back() == ']') {
      section = text.substr(1, text.size() - 2);
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    sections[section][trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }

  auto trim_item = [](std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  auto get = [&sections](const std::string& sec, const std::string& key,
                         const std::string& fallback) {
    auto s = sections.find(sec);
    if (s == sections.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
  };

  ExperimentSpec spec;
  spec.kind = get("experiment", "kind", spec.kind);
  spec.output_dir = get("experiment", "output_dir", spec.output_dir);
  spec.buckets = std::stoi(get("experiment", "buckets", "30"));
  spec.shuffle_seeds = std::stoi(get("experiment", "seeds", "1"));

  std::string corpora = get("data", "corpora", "");
  if (corpora.empty()) {
    std::string cpath = get("data", "corpus", "");
    if (!cpath.empty())
      spec.corpora.emplace_back(get("data", "domain", "default"), cpath);
  } else {
    std::istringstream ss(corpora);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_item(item);
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("experiment: corpora entries are domain:path");
      spec.corpora.emplace_back(item.substr(0, colon), item.substr(colon + 1));
    }
  }

  model::ModelConfig base;
  base.encoder = get("model", "encoder", base.encoder);
  base.decoder = get("model", "decoder", base.decoder);
  base.embedding_source = get("model", "embedding_source", base.embedding_source);
  base.embedding_path = get("model", "embedding_path", base.embedding_path);
  base.contextual_store = get("model", "contextual_store", base.contextual_store);
  base.embed_dim = std::stoi(get("model", "embed_dim", std::to_string(base.embed_dim)));
  base.sent_dim = std::stoi(get("model", "sent_dim", std::to_string(base.sent_dim)));
  base.doc_width = std::stoi(get("model", "doc_width", std::to_string(base.doc_width)));
  base.layers = std::stoi(get("model", "layers", std::to_string(base.layers)));
  base.heads = std::stoi(get("model", "heads", std::to_string(base.heads)));
  base.alpha = std::stod(get("model", "alpha", "1"));
  base.beta = std::stod(get("model", "beta", "1"));
  base.pointer_state_dim =
      std::stoi(get("model", "pointer_state_dim", std::to_string(base.pointer_state_dim)));
  base.attn_dim = std::stoi(get("model", "attn_dim", std::to_string(base.attn_dim)));
  base.seqlab_hidden =
      std::stoi(get("model", "seqlab_hidden", std::to_string(base.seqlab_hidden)));
  base.max_sentences =
      std::stoi(get("model", "max_sentences", std::to_string(base.max_sentences)));
  base.max_tokens = std::stoi(get("model", "max_tokens", std::to_string(base.max_tokens)));
  base.seed = std::stoull(get("model", "seed", "0"));

  std::string grid = get("model", "grid", "");
  if (grid.empty()) {
    spec.grid.push_back(base);
  } else {
    std::istringstream ss(grid);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_item(item);
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("experiment: grid entries are encoder:decoder");
      model::ModelConfig cfg = base;
      cfg.encoder = item.substr(0, colon);
      cfg.decoder = item.substr(colon + 1);
      spec.grid.push_back(cfg);
    }
  }

  std::string pairs = get("experiment", "pairs", "");
  if (!pairs.empty()) {
    std::istringstream ss(pairs);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim_item(item);
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("experiment: pairs entries are alpha:beta");
      spec.disentangle_pairs.emplace_back(std::stod(item.substr(0, colon)),
                                          std::stod(item.substr(colon + 1)));
    }
  }

  spec.train.schema = get("train", "schema", spec.train.schema);
  spec.train.learning_rate =
      std::stod(get("train", "learning_rate", std::to_string(spec.train.learning_rate)));
  spec.train.batch_size =
      std::stoi(get("train", "batch_size", std::to_string(spec.train.batch_size)));
  spec.train.max_epochs =
      std::stoi(get("train", "max_epochs", std::to_string(spec.train.max_epochs)));
  spec.train.clip_norm =
      std::stod(get("train", "clip_norm", std::to_string(spec.train.clip_norm)));
  spec.train.seed = std::stoull(get("train", "seed", "0"));
  spec.train.extract_k = std::stoi(get("train", "extract_k", "3"));
  spec.train.patience = std::stoi(get("train", "patience", "3"));
  spec.validate();
  return spec;
}

std::string render_aligned(const Report& report) {
  std::vector<size_t> widths(report.columns.size(), 0);
  auto grow = [&widths](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i)
      widths[i] = std::max(widths[i], row[i].size());
  };
  grow(report.columns);
  for (const auto& row : report.rows) grow(row);

  std::ostringstream out;
  out << "# " << report.title << "\n";
  auto emit = [&out, &widths](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      out << row[i];
      if (i + 1 < row.size())
        out << std::string(widths[i] - row[i].size() + 2, ' ');
    }
    out << "\n";
  };
  emit(report.columns);
  std::vector<std::string> rule;
  for (size_t w : widths) rule.push_back(std::string(w, '-'));
  emit(rule);
  for (const auto& row : report.rows) emit(row);
  return out.str();
}

void write_tsv(const Report& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  auto emit = [&out](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? '\t' : '\n');
  };
  emit(report.columns);
  for (const auto& row : report.rows) emit(row);
}

Report run_cross_domain(const ExperimentSpec& spec, std::vector<CellTrace>* traces) {
  Report report;
  report.title = "cross-domain evaluation";
  report.columns = {"model"};
  for (const auto& [domain, path] : spec.corpora)
    for (const char* m : {":R-1", ":R-2", ":R-L"})
      report.columns.push_back(domain + m);

  std::vector<std::string> row_names = {"Lead", "Oracle"};
  for (const auto& cfg : spec.grid) row_names.push_back(cell_name(cfg));
  std::map<std::string, std::vector<std::string>> cells;
  for (const auto& name : row_names) cells[name] = {name};

  for (const auto& [domain, path] : spec.corpora) {
    Corpus corpus = corpus::load_corpus(path, domain);
    ensure_oracle_labels(corpus);
    const int k = domain_extract_k(domain);
    const std::string hash = hash_string(corpus);

    RougeScore lead = baseline_rouge(corpus, k, false);
    RougeScore oracle = baseline_rouge(corpus, k, true);
    for (auto [name, score] : {std::pair{std::string("Lead"), lead},
                               std::pair{std::string("Oracle"), oracle}}) {
      for (double v : {score.rouge1.f1, score.rouge2.f1, score.rougeL.f1})
        cells[name].push_back(fmt(100.0 * v));
      push_trace(traces, name, domain, score, "", hash);
    }

    for (const auto& cfg : spec.grid) {
      const std::string name = cell_name(cfg);
      const std::string cell_dir =
          spec.output_dir.empty() ? "" : spec.output_dir + "/" + domain + "/" + name;
      try {
        std::string ckpt;
        RougeScore score = run_cell(spec, cfg, corpus, k, cell_dir, &ckpt);
        for (double v : {score.rouge1.f1, score.rouge2.f1, score.rougeL.f1})
          cells[name].push_back(fmt(100.0 * v));
        push_trace(traces, name, domain, score, ckpt, hash);
      } catch (const std::exception& e) {
        report.all_ok = false;
        for (int i = 0; i < 3; ++i) cells[name].push_back("FAILED");
        if (traces)
          traces->push_back({name, domain, "error", 0.0, "", hash, false, e.what()});
      }
    }
  }
  for (const auto& name : row_names) report.rows.push_back(cells[name]);
  return report;
}

Report run_disentangle(const ExperimentSpec& spec,
                       const std::vector<std::pair<double, double>>& pairs,
                       std::vector<CellTrace>* traces) {
  const model::ModelConfig* transformer = nullptr;
  for (const auto& cfg : spec.grid)
    if (cfg.encoder == "transformer") transformer = &cfg;
  if (!transformer)
    throw std::invalid_argument("disentangle: grid has no transformer encoder");
  for (const auto& [alpha, beta] : pairs)
    if (alpha == 0.0 && beta == 0.0)
      throw std::invalid_argument("disentangle: pair (0,0) rejected");

  Report report;
  report.title = "disentangling sweep (alpha * sentence embedding + beta * "
                 "positional embedding)";
  report.columns = {"alpha:beta", "R-1", "R-2", "R-L"};

  const auto& [domain, path] = spec.corpora.front();
  Corpus corpus = corpus::load_corpus(path, domain);
  ensure_oracle_labels(corpus);
  const int k = domain_extract_k(domain);
  const std::string hash = hash_string(corpus);

  for (const auto& [alpha, beta] : pairs) {
    model::ModelConfig cfg = *transformer;
    cfg.alpha = alpha;
    cfg.beta = beta;
    const std::string row = fmt(alpha) + ":" + fmt(beta);
    const std::string cell_dir =
        spec.output_dir.empty() ? "" : spec.output_dir + "/disentangle/" + row;
    try {
      std::string ckpt;
      RougeScore score = run_cell(spec, cfg, corpus, k, cell_dir, &ckpt);
      report.rows.push_back({row, fmt(100.0 * score.rouge1.f1),
                             fmt(100.0 * score.rouge2.f1), fmt(100.0 * score.rougeL.f1)});
      push_trace(traces, row, domain, score, ckpt, hash);
    } catch (const std::exception& e) {
      report.all_ok = false;
      report.rows.push_back({row, "FAILED", "FAILED", "FAILED"});
      if (traces)
        traces->push_back({row, domain, "error", 0.0, "", hash, false, e.what()});
    }
  }
  return report;
}

Report run_shuffled_training(const ExperimentSpec& spec,
                             std::vector<CellTrace>* traces) {
  Report report;
  report.title = "shuffled-training robustness (delta = normal - shuffled)";
  report.columns = {"model", "dR-1", "dR-2", "dR-L", "R-1 normal", "R-1 shuffled"};

  const auto& [domain, path] = spec.corpora.front();
  Corpus corpus = corpus::load_corpus(path, domain);
  ensure_oracle_labels(corpus);
  const int k = domain_extract_k(domain);
  const std::string hash = hash_string(corpus);

  Corpus shuffled = corpus;
  if (shuffled.has_split("train")) {
    for (int i : shuffled.split("train"))
      shuffled.documents[i] = corpus::shuffle_sentences(
          shuffled.documents[i], spec.train.seed + static_cast<std::uint64_t>(i));
  } else {
    for (size_t i = 0; i < shuffled.documents.size(); ++i)
      shuffled.documents[i] = corpus::shuffle_sentences(
          shuffled.documents[i], spec.train.seed + static_cast<std::uint64_t>(i));
  }
  // sanity: shuffling permutes within documents, the document multiset as
  // token bags must be unchanged
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    auto bag = [](const Document& d) {
      std::multiset<std::vector<std::string>> b;
      for (const auto& s : d.sentences) b.insert(s);
      return b;
    };
    if (bag(corpus.documents[i]) != bag(shuffled.documents[i]))
      throw std::logic_error("shuffled corpus lost sentences");
  }

  for (const auto& cfg : spec.grid) {
    const std::string name = cell_name(cfg);
    try {
      std::string ckpt_n, ckpt_s;
      const std::string base_dir =
          spec.output_dir.empty() ? "" : spec.output_dir + "/shuffle/" + name;
      RougeScore normal = run_cell(spec, cfg, corpus, k,
                                   base_dir.empty() ? "" : base_dir + "/normal", &ckpt_n);
      RougeScore shuf = run_cell(spec, cfg, shuffled, k,
                                 base_dir.empty() ? "" : base_dir + "/shuffled", &ckpt_s);
      report.rows.push_back({name, fmt(100.0 * (normal.rouge1.f1 - shuf.rouge1.f1)),
                             fmt(100.0 * (normal.rouge2.f1 - shuf.rouge2.f1)),
                             fmt(100.0 * (normal.rougeL.f1 - shuf.rougeL.f1)),
                             fmt(100.0 * normal.rouge1.f1), fmt(100.0 * shuf.rouge1.f1)});
      push_trace(traces, name + "/normal", domain, normal, ckpt_n, hash);
      push_trace(traces, name + "/shuffled", domain, shuf, ckpt_s, hash);
    } catch (const std::exception& e) {
      report.all_ok = false;
      report.rows.push_back({name, "FAILED", "FAILED", "FAILED", "", ""});
      if (traces)
        traces->push_back({name, domain, "error", 0.0, "", hash, false, e.what()});
    }
  }
  return report;
}

DiagnosticsReport run_diagnostics(const std::vector<ExtractionResult>& extractions,
                                  const Corpus& corpus, int buckets,
                                  const std::string& out_dir) {
  DiagnosticsReport rep;
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& d : corpus.documents) by_id[d.id] = &d;
  for (const auto& res : extractions)
    if (!by_id.count(res.doc_id))
      throw std::invalid_argument("diagnostics: unknown doc id " + res.doc_id);

  for (int n = 1; n <= 3; ++n) {
    double sum = 0.0;
    long counted = 0;
    for (const auto& res : extractions) {
      Sentence stream;
      const Document* doc = by_id.at(res.doc_id);
      for (int idx : res.selected)
        stream.insert(stream.end(), doc->sentences.at(idx).begin(),
                      doc->sentences.at(idx).end());
      if (static_cast<int>(stream.size()) < n) continue;
      sum += metrics::repetition_score(stream, n);
      ++counted;
    }
    if (counted) rep.rep[n] = sum / counted;
  }
  metrics::PositionalBias pb = metrics::positional_bias(corpus, buckets);
  rep.pos_bias = pb.entropy;
  rep.pos_bias_buckets = pb.buckets;
  rep.pos_bias_skipped = pb.skipped;
  rep.length_profile = metrics::length_profile(extractions, corpus);
  rep.rouge = metrics::aggregate_rouge(extractions, corpus);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    {
      std::ofstream out(out_dir + "/repetition.tsv");
      out << "n\trep_n\n";
      for (const auto& [n, v] : rep.rep) out << n << '\t' << fmt4(v) << '\n';
    }
    {
      std::ofstream out(out_dir + "/length_profile.tsv");
      out << "step\tmean_tokens\n";
      for (const auto& [k, v] : rep.length_profile) out << k << '\t' << fmt4(v) << '\n';
    }
    {
      std::ofstream out(out_dir + "/pos_bias.tsv");
      out << "bucket\tp\n";
      for (size_t i = 0; i < pb.distribution.size(); ++i)
        out << i << '\t' << fmt4(pb.distribution[i]) << '\n';
      out << "entropy\t" << fmt4(pb.entropy) << '\n';
    }
  }
  return rep;
}

bool run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  fs::create_directories(spec.output_dir);
  std::vector<CellTrace> traces;
  Report report;
  if (spec.kind == "cross-domain" || spec.kind == "single" ||
      spec.kind == "knowledge" || spec.kind == "rl-stack") {
    report = run_cross_domain(spec, &traces);
  } else if (spec.kind == "disentangle") {
    auto pairs = spec.disentangle_pairs.empty()
                     ? default_disentangle_pairs(spec.grid.front().doc_width)
                     : spec.disentangle_pairs;
    report = run_disentangle(spec, pairs, &traces);
  } else {  // shuffle
    report = run_shuffled_training(spec, &traces);
  }

  std::ofstream txt(spec.output_dir + "/report.txt");
  txt << render_aligned(report);
  write_tsv(report, spec.output_dir + "/report.tsv");

  std::ofstream cells(spec.output_dir + "/cells.tsv");
  cells << "row\tdomain\tmetric\tvalue\tcheckpoint\tcorpus_hash\tstatus\terror\n";
  for (const auto& t : traces)
    cells << t.row << '\t' << t.domain << '\t' << t.metric << '\t' << fmt4(t.value)
          << '\t' << t.checkpoint << '\t' << t.corpus_hash << '\t'
          << (t.ok ? "ok" : "failed") << '\t' << t.error << '\n';
  return report.all_ok;
}

void save_extractions(const std::vector<ExtractionResult>& results,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write extractions: " + path);
  for (const auto& res : results) {
    nlohmann::json rec;
    rec["id"] = res.doc_id;
    rec["selected"] = res.selected;
    if (!res.step_scores.empty()) rec["scores"] = res.step_scores;
    out << rec.dump() << '\n';
  }
}

std::vector<ExtractionResult> load_extractions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open extractions: " + path);
  std::vector<ExtractionResult> results;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      nlohmann::json rec = nlohmann::json::parse(line);
      ExtractionResult res;
      res.doc_id = rec.at("id").get<std::string>();
      res.selected = rec.at("selected").get<std::vector<int>>();
      if (rec.contains("scores"))
        res.step_scores = rec["scores"].get<std::vector<double>>();
      std::set<int> uniq(res.selected.begin(), res.selected.end());
      if (uniq.size() != res.selected.size())
        throw std::runtime_error("duplicate indices");
      results.push_back(std::move(res));
    } catch (const std::exception& e) {
      throw std::runtime_error("extractions line " + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
  return results;
}

}  // namespace sumprobe::harness
