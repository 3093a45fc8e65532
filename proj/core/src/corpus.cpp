#include "sumprobe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "sumprobe/metrics.hpp"

namespace sumprobe {

const std::vector<int>& Corpus::split(const std::string& name) const {
  auto it = splits.find(name);
  if (it == splits.end()) throw std::out_of_range("corpus has no split: " + name);
  return it->second;
}

}  // namespace sumprobe

namespace sumprobe::corpus {

using nlohmann::json;

namespace {

std::vector<Sentence> parse_sentences(const json& arr, const char* field, size_t line) {
  if (!arr.is_array() || arr.empty())
    throw std::runtime_error("line " + std::to_string(line) + ": field '" +
                             field + "' must be a nonempty array");
  std::vector<Sentence> out;
  for (const auto& sent : arr) {
    if (!sent.is_array() || sent.empty())
      throw std::runtime_error("line " + std::to_string(line) + ": field '" +
                               field + "' contains an empty sentence");
    Sentence s;
    for (const auto& tok : sent) s.push_back(tok.get<std::string>());
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

Corpus load_corpus(const std::string& path, const std::string& domain) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  Corpus corpus;
  corpus.domain = domain;
  std::string line;
  size_t lineno = 0;
  std::vector<std::string> errors;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      json rec = json::parse(line);
      Document doc;
      doc.id = rec.at("id").get<std::string>();
      doc.sentences = parse_sentences(rec.at("sentences"), "sentences", lineno);
      doc.reference = parse_sentences(rec.at("reference"), "reference", lineno);
      if (rec.contains("labels")) {
        auto labels = rec["labels"].get<std::vector<int>>();
        if (labels.size() != doc.sentences.size())
          throw std::runtime_error("line " + std::to_string(lineno) +
                                   ": labels length mismatch");
        if (std::none_of(labels.begin(), labels.end(), [](int v) { return v != 0; }))
          throw std::runtime_error("line " + std::to_string(lineno) +
                                   ": labels present but none set");
        doc.oracle_labels = std::move(labels);
      }
      doc.domain = rec.value("domain", domain);
      if (rec.contains("split")) {
        corpus.splits[rec["split"].get<std::string>()].push_back(
            static_cast<int>(corpus.documents.size()));
      }
      corpus.documents.push_back(std::move(doc));
    } catch (const json::exception& e) {
      errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::runtime_error& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "rejected " + std::to_string(errors.size()) + " record(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  if (corpus.documents.empty())
    throw std::runtime_error("empty corpus: " + path);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write corpus file: " + path);
  // invert splits so round-trips preserve them
  std::vector<std::string> split_of(corpus.documents.size());
  for (const auto& [name, indices] : corpus.splits)
    for (int i : indices) split_of.at(i) = name;
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    const Document& doc = corpus.documents[i];
    json rec;
    rec["id"] = doc.id;
    rec["sentences"] = doc.sentences;
    rec["reference"] = doc.reference;
    if (doc.oracle_labels) rec["labels"] = *doc.oracle_labels;
    if (!doc.domain.empty()) rec["domain"] = doc.domain;
    if (!split_of[i].empty()) rec["split"] = split_of[i];
    out << rec.dump() << '\n';
  }
}

std::vector<int> greedy_oracle_labels(const Document& doc, int max_select) {
  if (doc.sentences.empty())
    throw std::invalid_argument("greedy_oracle_labels: document has no sentences");
  if (max_select < 1)
    throw std::invalid_argument("greedy_oracle_labels: max_select must be >= 1");
  const int n = doc.num_sentences();
  std::vector<int> flags(n, 0);
  std::vector<int> selected;
  auto objective = [&](const std::vector<int>& sel) {
    std::vector<Sentence> hyp;
    for (int i : sel) hyp.push_back(doc.sentences[i]);
    RougeScore s = metrics::rouge_scores(hyp, doc.reference);
    return 0.5 * (s.rouge1.f1 + s.rouge2.f1);
  };
  double best_obj = 0.0;
  while (static_cast<int>(selected.size()) < std::min(max_select, n)) {
    int best_idx = -1;
    double best_cand = -1.0;
    for (int i = 0; i < n; ++i) {
      if (flags[i]) continue;
      selected.push_back(i);
      double obj = objective(selected);
      selected.pop_back();
      if (obj > best_cand) {  // ties keep the lower index
        best_cand = obj;
        best_idx = i;
      }
    }
    // the first pick is always taken, even at zero objective
    if (!selected.empty() && best_cand <= best_obj) break;
    flags[best_idx] = 1;
    selected.push_back(best_idx);
    best_obj = best_cand;
  }
  return flags;
}

ExtractionResult lead_k(const Document& doc, int k) {
  if (k < 1) throw std::invalid_argument("lead_k: k must be >= 1");
  ExtractionResult res;
  res.doc_id = doc.id;
  const int m = std::min(k, doc.num_sentences());
  for (int i = 0; i < m; ++i) res.selected.push_back(i);
  return res;
}

Document shuffle_sentences(const Document& doc, std::uint64_t seed) {
  Document out = doc;
  const int n = doc.num_sentences();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 0; i < n; ++i) out.sentences[i] = doc.sentences[perm[i]];
  if (doc.oracle_labels) {
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = (*doc.oracle_labels)[perm[i]];
    out.oracle_labels = std::move(labels);
  }
  return out;
}

DomainStats domain_stats(const Corpus& corpus) {
  if (corpus.documents.empty())
    throw std::invalid_argument("domain_stats: empty corpus");
  DomainStats stats;
  stats.domain = corpus.domain;
  stats.num_documents = static_cast<int>(corpus.documents.size());
  for (const auto& [name, indices] : corpus.splits)
    stats.split_counts[name] = static_cast<int>(indices.size());
  double sent_sum = 0.0, ref_sum = 0.0;
  for (const auto& doc : corpus.documents) {
    sent_sum += static_cast<double>(doc.sentences.size());
    ref_sum += static_cast<double>(doc.reference.size());
  }
  stats.mean_sentences = sent_sum / stats.num_documents;
  stats.mean_reference_sentences = ref_sum / stats.num_documents;
  return stats;
}

std::uint64_t corpus_hash(const Corpus& corpus) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;
    h *= 1099511628211ULL;
  };
  for (const auto& doc : corpus.documents) {
    mix(doc.id);
    mix(doc.domain);
    for (const auto& s : doc.sentences)
      for (const auto& t : s) mix(t);
    for (const auto& s : doc.reference)
      for (const auto& t : s) mix(t);
    if (doc.oracle_labels)
      for (int v : *doc.oracle_labels) mix(v ? "1" : "0");
  }
  return h;
}

}  // namespace sumprobe::corpus
