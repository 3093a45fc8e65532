#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "support/oracles.hpp"
#include "sumprobe/corpus.hpp"

using namespace sumprobe;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

Corpus small_corpus() {
  Corpus corpus;
  corpus.domain = "unit";
  for (int i = 0; i < 6; ++i) {
    Document d;
    d.id = "doc" + std::to_string(i);
    d.domain = "unit";
    d.sentences = {{"one", "two"}, {"three"}, {"four", "five", "six"}};
    d.reference = {{"three"}};
    d.oracle_labels = std::vector<int>{0, 1, 0};
    corpus.documents.push_back(d);
    corpus.splits[i < 4 ? "train" : "test"].push_back(i);
  }
  return corpus;
}

}  // namespace

TEST_CASE("corpus round trips through jsonl") {
  Corpus corpus = small_corpus();
  std::string path = temp_path("sumprobe_roundtrip.jsonl");
  corpus::save_corpus(corpus, path);
  Corpus back = corpus::load_corpus(path, "unit");
  REQUIRE(back.documents.size() == corpus.documents.size());
  CHECK(back.documents[0].sentences == corpus.documents[0].sentences);
  CHECK(back.documents[0].reference == corpus.documents[0].reference);
  CHECK(*back.documents[0].oracle_labels == *corpus.documents[0].oracle_labels);
  CHECK(back.split("train") == corpus.split("train"));
  CHECK(back.split("test") == corpus.split("test"));
  CHECK(corpus::corpus_hash(back) == corpus::corpus_hash(corpus));
  fs::remove(path);
}

TEST_CASE("malformed corpus lines are rejected with line numbers") {
  std::string path = temp_path("sumprobe_bad.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"ok","sentences":[["a"]],"reference":[["a"]]})" << "\n";
    out << "{ not json\n";
    out << R"({"id":"empty","sentences":[[]],"reference":[["a"]]})" << "\n";
    out << R"({"id":"mismatch","sentences":[["a"]],"reference":[["a"]],"labels":[1,0]})"
        << "\n";
    out << R"({"id":"unset","sentences":[["a"]],"reference":[["a"]],"labels":[0]})"
        << "\n";
  }
  try {
    corpus::load_corpus(path, "unit");
    FAIL("expected rejection");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("rejected 4 record(s)") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("line 5") != std::string::npos);
  }
  fs::remove(path);

  std::string empty = temp_path("sumprobe_empty.jsonl");
  std::ofstream(empty).close();
  CHECK_THROWS_AS(corpus::load_corpus(empty, "unit"), std::runtime_error);
  fs::remove(empty);
}

TEST_CASE("lead_k clamps to the document") {
  Document d;
  d.id = "d";
  d.sentences.assign(10, {"w"});
  d.reference = {{"w"}};
  CHECK(corpus::lead_k(d, 3).selected == std::vector<int>{0, 1, 2});
  CHECK(corpus::lead_k(d, 99).selected.size() == 10);
  CHECK_THROWS_AS(corpus::lead_k(d, 0), std::invalid_argument);
}

TEST_CASE("shuffle keeps the sentence multiset and moves labels along") {
  Document d;
  d.id = "d";
  d.sentences = {{"a"}, {"b"}, {"c"}, {"d"}, {"e"}};
  d.reference = {{"c"}};
  d.oracle_labels = std::vector<int>{0, 0, 1, 0, 0};

  Document one;
  one.id = "one";
  one.sentences = {{"only"}};
  one.reference = {{"only"}};
  CHECK(corpus::shuffle_sentences(one, 9).sentences == one.sentences);

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Document s = corpus::shuffle_sentences(d, seed);
    CHECK(s.reference == d.reference);
    std::multiset<Sentence> before(d.sentences.begin(), d.sentences.end());
    std::multiset<Sentence> after(s.sentences.begin(), s.sentences.end());
    CHECK(before == after);
    // the flagged sentence is still the flagged sentence
    for (int i = 0; i < s.num_sentences(); ++i)
      CHECK(((*s.oracle_labels)[i] == 1) == (s.sentences[i] == Sentence{"c"}));
    // same seed, same permutation
    Document again = corpus::shuffle_sentences(d, seed);
    CHECK(again.sentences == s.sentences);
  }
}

TEST_CASE("greedy oracle matches the brute-force oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    Document d;
    d.id = "t" + std::to_string(trial);
    d.sentences = oracles::random_sentences(rng, 7, 8, 12);
    d.reference = oracles::random_sentences(rng, 3, 8, 12);
    CHECK(corpus::greedy_oracle_labels(d, 4) == oracles::brute_greedy_labels(d, 4));
  }
}

TEST_CASE("greedy oracle edge cases") {
  Document d;
  d.id = "d";
  d.sentences = {{"zebra"}, {"the", "cat", "sat"}};
  d.reference = {{"the", "cat", "sat"}};
  CHECK(corpus::greedy_oracle_labels(d) == std::vector<int>{0, 1});

  // no overlap anywhere: exactly one label, the argmax (index 0 on ties)
  Document z;
  z.id = "z";
  z.sentences = {{"a"}, {"b"}};
  z.reference = {{"c"}};
  CHECK(corpus::greedy_oracle_labels(z) == std::vector<int>{1, 0});
}

TEST_CASE("domain stats means") {
  Corpus corpus;
  Document a, b;
  a.id = "a";
  a.sentences.assign(10, {"w"});
  a.reference = {{"w"}};
  b.id = "b";
  b.sentences.assign(20, {"w"});
  b.reference = {{"w"}, {"w"}};
  corpus.documents = {a, b};
  corpus::DomainStats stats = corpus::domain_stats(corpus);
  CHECK(stats.num_documents == 2);
  CHECK(stats.mean_sentences == doctest::Approx(15.0));
  CHECK(stats.mean_reference_sentences == doctest::Approx(1.5));
}

TEST_CASE("corpus hash is content sensitive") {
  Corpus corpus = small_corpus();
  std::uint64_t h = corpus::corpus_hash(corpus);
  Corpus changed = corpus;
  changed.documents[0].sentences[0][0] = "changed";
  CHECK(corpus::corpus_hash(changed) != h);
}
