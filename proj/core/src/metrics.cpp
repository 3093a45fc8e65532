#include "sumprobe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sumprobe::metrics {

namespace {

double f1(double p, double r) { return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0; }

std::vector<Sentence> stem_all(const std::vector<Sentence>& sents) {
  std::vector<Sentence> out(sents.size());
  for (size_t i = 0; i < sents.size(); ++i) {
    out[i].reserve(sents[i].size());
    for (const auto& tok : sents[i]) out[i].push_back(porter_stem(tok));
  }
  return out;
}

// n-grams never cross sentence boundaries
using NgramCounts = std::unordered_map<std::string, int>;

std::pair<NgramCounts, long> ngram_counts(const std::vector<Sentence>& sents, int n) {
  NgramCounts counts;
  long total = 0;
  for (const auto& sent : sents) {
    if (static_cast<int>(sent.size()) < n) continue;
    for (size_t i = 0; i + n <= sent.size(); ++i) {
      std::string key = sent[i];
      for (int j = 1; j < n; ++j) {
        key.push_back('\x1f');
        key += sent[i + j];
      }
      ++counts[key];
      ++total;
    }
  }
  return {std::move(counts), total};
}

RougeTriple ngram_overlap(const std::vector<Sentence>& hyp,
                          const std::vector<Sentence>& ref, int n) {
  auto [hc, htotal] = ngram_counts(hyp, n);
  auto [rc, rtotal] = ngram_counts(ref, n);
  long hits = 0;
  for (const auto& [key, count] : rc) {
    auto it = hc.find(key);
    if (it != hc.end()) hits += std::min(count, it->second);
  }
  RougeTriple t;
  t.precision = htotal > 0 ? static_cast<double>(hits) / htotal : 0.0;
  t.recall = rtotal > 0 ? static_cast<double>(hits) / rtotal : 0.0;
  t.f1 = f1(t.precision, t.recall);
  return t;
}

// LCS with backtrace; returns the matched tokens of `a`.
std::vector<std::string> lcs_tokens(const Sentence& a, const Sentence& b) {
  const size_t m = a.size(), n = b.size();
  std::vector<std::vector<int>> dp(m + 1, std::vector<int>(n + 1, 0));
  for (size_t i = 1; i <= m; ++i)
    for (size_t j = 1; j <= n; ++j)
      dp[i][j] = (a[i - 1] == b[j - 1]) ? dp[i - 1][j - 1] + 1
                                        : std::max(dp[i - 1][j], dp[i][j - 1]);
  std::vector<std::string> matched;
  size_t i = m, j = n;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1] && dp[i][j] == dp[i - 1][j - 1] + 1) {
      matched.push_back(a[i - 1]);
      --i, --j;
    } else if (dp[i - 1][j] >= dp[i][j - 1]) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(matched.begin(), matched.end());
  return matched;
}

Sentence flatten(const std::vector<Sentence>& sents) {
  Sentence out;
  for (const auto& s : sents) out.insert(out.end(), s.begin(), s.end());
  return out;
}

RougeTriple rouge_l(const std::vector<Sentence>& hyp,
                    const std::vector<Sentence>& ref, bool sentence_level) {
  Sentence hyp_stream = flatten(hyp);
  Sentence ref_stream = flatten(ref);
  if (hyp_stream.empty() || ref_stream.empty()) return {};

  long hits = 0;
  if (sentence_level) {
    hits = static_cast<long>(lcs_tokens(ref_stream, hyp_stream).size());
  } else {
    // summary level: each reference sentence contributes its LCS with the
    // whole hypothesis stream; hits clipped by hypothesis token counts so
    // repeated matches are not double counted
    std::unordered_map<std::string, int> budget;
    for (const auto& tok : hyp_stream) ++budget[tok];
    for (const auto& rsent : ref) {
      for (const auto& tok : lcs_tokens(rsent, hyp_stream)) {
        auto it = budget.find(tok);
        if (it != budget.end() && it->second > 0) {
          --it->second;
          ++hits;
        }
      }
    }
  }
  RougeTriple t;
  t.precision = static_cast<double>(hits) / hyp_stream.size();
  t.recall = static_cast<double>(hits) / ref_stream.size();
  t.f1 = f1(t.precision, t.recall);
  return t;
}

}  // namespace

RougeScore rouge_scores(const std::vector<Sentence>& hypothesis,
                        const std::vector<Sentence>& reference,
                        const RougeOptions& opts) {
  if (reference.empty()) throw std::invalid_argument("rouge_scores: empty reference");
  std::vector<Sentence> hyp = opts.stem ? stem_all(hypothesis) : hypothesis;
  std::vector<Sentence> ref = opts.stem ? stem_all(reference) : reference;
  RougeScore s;
  s.rouge1 = ngram_overlap(hyp, ref, 1);
  s.rouge2 = ngram_overlap(hyp, ref, 2);
  s.rougeL = rouge_l(hyp, ref, opts.sentence_level_lcs);
  return s;
}

double repetition_score(const Sentence& tokens, int n) {
  if (n < 1) throw std::invalid_argument("repetition_score: n must be >= 1");
  if (static_cast<int>(tokens.size()) < n)
    throw std::invalid_argument("repetition_score: fewer tokens than n-gram order");
  auto [counts, total] = ngram_counts({tokens}, n);
  return static_cast<double>(counts.size()) / total;
}

PositionalBias positional_bias(const Corpus& corpus, int buckets) {
  if (buckets < 1) throw std::invalid_argument("positional_bias: buckets must be >= 1");
  PositionalBias out;
  out.buckets = buckets;
  std::vector<long> hist(buckets, 0);
  for (const auto& doc : corpus.documents) {
    if (!doc.oracle_labels.has_value()) {
      ++out.skipped;
      continue;
    }
    const auto& labels = *doc.oracle_labels;
    int first = -1;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i]) {
        first = static_cast<int>(i);
        break;
      }
    }
    if (first < 0) {
      ++out.skipped;
      continue;
    }
    const int n = doc.num_sentences();
    int bucket = std::min(buckets - 1, static_cast<int>(
        (static_cast<long>(first) * buckets) / n));
    ++hist[bucket];
    ++out.counted;
  }
  out.distribution.assign(buckets, 0.0);
  if (out.counted == 0) return out;
  double entropy = 0.0;
  for (int i = 0; i < buckets; ++i) {
    double p = static_cast<double>(hist[i]) / out.counted;
    out.distribution[i] = p;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  out.entropy = entropy;
  return out;
}

std::map<int, double> length_profile(const std::vector<ExtractionResult>& results,
                                     const Corpus& corpus) {
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& doc : corpus.documents) by_id[doc.id] = &doc;
  std::map<int, std::pair<double, long>> acc;  // step -> (sum, count)
  for (const auto& res : results) {
    auto it = by_id.find(res.doc_id);
    if (it == by_id.end())
      throw std::invalid_argument("length_profile: unknown doc id " + res.doc_id);
    for (size_t k = 0; k < res.selected.size(); ++k) {
      int idx = res.selected[k];
      auto& [sum, count] = acc[static_cast<int>(k) + 1];
      sum += static_cast<double>(it->second->sentences.at(idx).size());
      ++count;
    }
  }
  std::map<int, double> out;
  for (const auto& [step, sc] : acc) out[step] = sc.first / sc.second;
  return out;
}

RougeScore aggregate_rouge(const std::vector<ExtractionResult>& results,
                           const Corpus& corpus, const RougeOptions& opts) {
  if (results.empty()) throw std::invalid_argument("aggregate_rouge: no results");
  std::unordered_map<std::string, const Document*> by_id;
  for (const auto& doc : corpus.documents) by_id[doc.id] = &doc;
  RougeScore agg;
  auto add = [](RougeTriple& a, const RougeTriple& b) {
    a.precision += b.precision;
    a.recall += b.recall;
    a.f1 += b.f1;
  };
  for (const auto& res : results) {
    auto it = by_id.find(res.doc_id);
    if (it == by_id.end())
      throw std::invalid_argument("aggregate_rouge: unknown doc id " + res.doc_id);
    std::vector<Sentence> hyp;
    for (int idx : res.selected) hyp.push_back(it->second->sentences.at(idx));
    RougeScore s = rouge_scores(hyp, it->second->reference, opts);
    add(agg.rouge1, s.rouge1);
    add(agg.rouge2, s.rouge2);
    add(agg.rougeL, s.rougeL);
  }
  const double n = static_cast<double>(results.size());
  for (RougeTriple* t : {&agg.rouge1, &agg.rouge2, &agg.rougeL}) {
    t->precision /= n;
    t->recall /= n;
    t->f1 /= n;
  }
  return agg;
}

}  // namespace sumprobe::metrics
