#include "sumprobe/embeddings.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sumprobe::embeddings {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw std::runtime_error("contextual store: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& out, float v) {
  std::uint32_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, 4);
  write_u32(out, bits);
}

float read_f32(std::istream& in) {
  std::uint32_t bits = read_u32(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

constexpr char kStoreMagic[] = "SUMCTX1";

}  // namespace

int EmbeddingTable::row(const std::string& token) const {
  auto it = vocabulary.find(token);
  return it == vocabulary.end() ? -1 : it->second;
}

Eigen::VectorXd EmbeddingTable::lookup(const std::string& token) const {
  int r = row(token);
  if (r >= 0) return vectors.value.row(r).transpose();
  return oov_vector(token, dim());
}

Eigen::VectorXd oov_vector(const std::string& token, int dim) {
  std::mt19937_64 rng(fnv1a(token));
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = unif(rng);
  return v;
}

EmbeddingTable random_table(const std::vector<std::string>& vocab, int dim,
                            std::uint64_t seed) {
  if (vocab.empty()) throw std::invalid_argument("random_table: empty vocabulary");
  if (dim < 1) throw std::invalid_argument("random_table: dim must be >= 1");
  EmbeddingTable table;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  Mat vectors(vocab.size(), dim);
  for (size_t i = 0; i < vocab.size(); ++i) {
    if (!table.vocabulary.emplace(vocab[i], static_cast<int>(i)).second)
      throw std::invalid_argument("random_table: duplicate vocab token " + vocab[i]);
    for (int j = 0; j < dim; ++j) vectors(i, j) = unif(rng);
  }
  table.vectors = nn::Parameter("embeddings", std::move(vectors));
  return table;
}

EmbeddingTable load_table(const std::string& path,
                          const std::vector<std::string>& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);

  std::unordered_map<std::string, std::vector<double>> loaded;
  int dim = -1;
  int duplicates = 0;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (first) {
      first = false;
      // optional "<count> <dim>" header
      if (vals.size() == 1) {
        bool numeric = !token.empty() &&
                       token.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) continue;
      }
    }
    if (dim < 0) dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim || dim == 0)
      throw std::runtime_error("embedding file: inconsistent dimension at token '" +
                               token + "'");
    if (!loaded.emplace(token, std::move(vals)).second) ++duplicates;
  }
  if (dim <= 0) throw std::runtime_error("embedding file is empty: " + path);

  EmbeddingTable table;
  table.duplicate_tokens = duplicates;
  Mat vectors(vocab.size(), dim);
  for (size_t i = 0; i < vocab.size(); ++i) {
    table.vocabulary.emplace(vocab[i], static_cast<int>(i));
    auto it = loaded.find(vocab[i]);
    if (it != loaded.end()) {
      for (int j = 0; j < dim; ++j) vectors(i, j) = it->second[j];
    } else {
      vectors.row(i) = oov_vector(vocab[i], dim).transpose();
      ++table.oov_initialized;
    }
  }
  table.vectors = nn::Parameter("embeddings", std::move(vectors));
  return table;
}

ContextualStore load_store(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open contextual store: " + path);
  char magic[7];
  in.read(magic, 7);
  if (!in || std::string(magic, 7) != kStoreMagic)
    throw std::runtime_error("contextual store: bad magic in " + path);
  char mode_byte;
  in.read(&mode_byte, 1);
  if (mode_byte != 0 && mode_byte != 1)
    throw std::runtime_error("contextual store: unknown mode byte");
  ContextualStore store;
  store.mode = static_cast<ContextualStore::Mode>(mode_byte);
  store.dim = static_cast<int>(read_u32(in));
  if (store.dim <= 0) throw std::runtime_error("contextual store: bad dimension");
  while (in.peek() != EOF) {
    std::uint32_t id_len = read_u32(in);
    std::string id(id_len, '\0');
    in.read(id.data(), id_len);
    std::uint32_t tokens = read_u32(in);
    Mat rec(store.dim, tokens);
    for (std::uint32_t t = 0; t < tokens; ++t)
      for (int d = 0; d < store.dim; ++d) rec(d, t) = read_f32(in);
    if (!in) throw std::runtime_error("contextual store: truncated record " + id);
    if (!store.records.emplace(id, std::move(rec)).second)
      throw std::runtime_error("contextual store: duplicate doc id " + id);
    store.doc_order.push_back(id);
  }
  return store;
}

void save_store(const ContextualStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write contextual store: " + path);
  out.write(kStoreMagic, 7);
  char mode_byte = static_cast<char>(store.mode);
  out.write(&mode_byte, 1);
  write_u32(out, static_cast<std::uint32_t>(store.dim));
  for (const auto& id : store.doc_order) {
    const Mat& rec = store.records.at(id);
    write_u32(out, static_cast<std::uint32_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    write_u32(out, static_cast<std::uint32_t>(rec.cols()));
    for (Eigen::Index t = 0; t < rec.cols(); ++t)
      for (Eigen::Index d = 0; d < rec.rows(); ++d)
        write_f32(out, static_cast<float>(rec(d, t)));
  }
}

SentenceRep sentence_rep_from_store(const ContextualStore& store,
                                    const Document& doc, int sentence_index) {
  auto it = store.records.find(doc.id);
  if (it == store.records.end())
    throw std::out_of_range("contextual store has no doc: " + doc.id);
  if (sentence_index < 0 || sentence_index >= doc.num_sentences())
    throw std::out_of_range("sentence index out of range");
  const Mat& rec = it->second;
  long offset = 0;
  for (int i = 0; i < sentence_index; ++i)
    offset += static_cast<long>(doc.sentences[i].size());
  long len = static_cast<long>(doc.sentences[sentence_index].size());

  SentenceRep rep;
  if (offset >= rec.cols()) {
    rep.vector = Eigen::VectorXd::Zero(store.dim);
    rep.truncated = true;
    return rep;
  }
  long avail = std::min(len, static_cast<long>(rec.cols()) - offset);
  rep.vector = rec.middleCols(offset, avail).rowwise().mean();
  return rep;
}

ContextualProjection::ContextualProjection(int input_dim, int hidden_dim,
                                           std::uint64_t seed, int output_dim) {
  if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
    throw std::invalid_argument("contextual projection: bad dimensions");
  std::mt19937_64 rng(seed);
  auto init = [&rng](int r, int c) {
    std::uniform_real_distribution<double> unif(-0.1, 0.1);
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = unif(rng);
    return m;
  };
  w1 = nn::Parameter("ctx_proj.w1", init(hidden_dim, input_dim));
  b1 = nn::Parameter("ctx_proj.b1", Mat::Zero(hidden_dim, 1));
  w2 = nn::Parameter("ctx_proj.w2", init(output_dim, hidden_dim));
  b2 = nn::Parameter("ctx_proj.b2", Mat::Zero(output_dim, 1));
}

nn::Expr ContextualProjection::apply(nn::Tape& tape, nn::Expr tokens_in) {
  if (tokens_in.value().rows() != input_dim())
    throw std::invalid_argument("contextual projection: input width mismatch");
  nn::Expr h = tanh_(affine(tape.param(w1), tokens_in, tape.param(b1)));
  return affine(tape.param(w2), h, tape.param(b2));
}

std::vector<nn::Parameter*> ContextualProjection::parameters() {
  return {&w1, &b1, &w2, &b2};
}

}  // namespace sumprobe::embeddings
