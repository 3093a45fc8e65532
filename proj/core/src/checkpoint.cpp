#include "sumprobe/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "sumprobe/embeddings.hpp"

namespace sumprobe::checkpoint {

namespace {

constexpr char kMagic[] = "SUMCKPT1";

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
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

nlohmann::json provenance_json(const Provenance& p) {
  return {{"corpus", p.corpus},
          {"corpus_hash", p.corpus_hash},
          {"schema", p.schema},
          {"epoch", p.epoch},
          {"validation_r1", p.validation_r1}};
}

Provenance provenance_from(const nlohmann::json& j) {
  Provenance p;
  p.corpus = j.value("corpus", "");
  p.corpus_hash = j.value("corpus_hash", "");
  p.schema = j.value("schema", "none");
  p.epoch = j.value("epoch", 0);
  p.validation_r1 = j.value("validation_r1", 0.0);
  return p;
}

}  // namespace

void save_checkpoint(const std::string& path, model::ExtractiveModel& model,
                     const Provenance& provenance) {
  model.snap_params_to_f32();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, 8);

  nlohmann::json manifest;
  manifest["config"] = nlohmann::json::parse(to_json_string(model.config()));
  manifest["vocab"] = model.vocab();
  manifest["provenance"] = provenance_json(provenance);
  std::string mtext = manifest.dump();
  write_u32(out, static_cast<std::uint32_t>(mtext.size()));
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));

  auto params = model.parameters();
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (nn::Parameter* p : params) {
    write_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u32(out, static_cast<std::uint32_t>(p->value.rows()));
    write_u32(out, static_cast<std::uint32_t>(p->value.cols()));
    for (Eigen::Index i = 0; i < p->value.rows(); ++i) {
      for (Eigen::Index j = 0; j < p->value.cols(); ++j) {
        float f = static_cast<float>(p->value(i, j));
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        write_u32(out, bits);
      }
    }
  }
}

Loaded load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);

  std::uint32_t mlen = read_u32(in);
  std::string mtext(mlen, '\0');
  in.read(mtext.data(), mlen);
  nlohmann::json manifest = nlohmann::json::parse(mtext);

  Loaded loaded;
  loaded.config = model::config_from_json_string(manifest.at("config").dump());
  loaded.provenance = provenance_from(manifest.at("provenance"));
  std::vector<std::string> vocab =
      manifest.at("vocab").get<std::vector<std::string>>();
  loaded.model =
      std::make_unique<model::ExtractiveModel>(loaded.config, std::move(vocab));
  if (loaded.config.embedding_source == "contextual" &&
      !loaded.config.contextual_store.empty())
    loaded.model->attach_contextual_store(
        embeddings::load_store(loaded.config.contextual_store));

  std::unordered_map<std::string, nn::Parameter*> by_name;
  for (nn::Parameter* p : loaded.model->parameters()) by_name[p->name] = p;

  std::uint32_t count = read_u32(in);
  std::uint32_t applied = 0;
  for (std::uint32_t t = 0; t < count; ++t) {
    std::uint32_t nlen = read_u32(in);
    std::string name(nlen, '\0');
    in.read(name.data(), nlen);
    std::uint32_t rows = read_u32(in);
    std::uint32_t cols = read_u32(in);
    auto it = by_name.find(name);
    if (it == by_name.end())
      throw std::runtime_error("checkpoint: unknown tensor " + name);
    nn::Parameter* p = it->second;
    if (p->value.rows() != static_cast<Eigen::Index>(rows) ||
        p->value.cols() != static_cast<Eigen::Index>(cols))
      throw std::runtime_error("checkpoint: shape mismatch for tensor " + name);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) {
        std::uint32_t bits = read_u32(in);
        float f;
        std::memcpy(&f, &bits, 4);
        p->value(i, j) = static_cast<double>(f);
      }
    }
    ++applied;
  }
  if (applied != by_name.size())
    throw std::runtime_error("checkpoint: missing tensors for current config");
  return loaded;
}

}  // namespace sumprobe::checkpoint
