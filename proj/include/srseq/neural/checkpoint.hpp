#pragma once

// Single-file checkpoint:
//   8 bytes   magic "SRSEQCK1"
//   8 bytes   header length L, little-endian
//   L bytes   JSON header (version, config, scheme, vocabulary, tensor shapes)
//   tensors   in header order, row-major float64, little-endian

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "srseq/neural/train.hpp"

namespace srseq::neural {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline constexpr char kMagic[8] = {'S', 'R', 'S', 'E', 'Q', 'C', 'K', '1'};

inline void write_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    const int c = in.get();
    if (c == EOF) throw CheckpointError("truncated checkpoint");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

inline nlohmann::json config_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},
          {"encoder_layers", c.encoder_layers},
          {"decoder_layers", c.decoder_layers},
          {"heads", c.heads},
          {"d_ff", c.d_ff},
          {"max_positions", c.max_positions},
          {"specialized_heads", c.specialized_heads},
          {"dropout", c.dropout},
          {"label_smoothing", c.label_smoothing},
          {"lr", c.lr},
          {"warmup_init_lr", c.warmup_init_lr},
          {"min_lr", c.min_lr},
          {"warmup", c.warmup},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"beam", c.beam},
          {"seed", c.seed}};
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model");
  c.encoder_layers = j.at("encoder_layers");
  c.decoder_layers = j.at("decoder_layers");
  c.heads = j.at("heads");
  c.d_ff = j.at("d_ff");
  c.max_positions = j.at("max_positions");
  c.specialized_heads = j.at("specialized_heads");
  c.dropout = j.at("dropout");
  c.label_smoothing = j.at("label_smoothing");
  c.lr = j.at("lr");
  c.warmup_init_lr = j.at("warmup_init_lr");
  c.min_lr = j.at("min_lr");
  c.warmup = j.at("warmup");
  c.beta1 = j.at("beta1");
  c.beta2 = j.at("beta2");
  c.adam_eps = j.at("adam_eps");
  c.batch_size = j.at("batch_size");
  c.epochs = j.at("epochs");
  c.beam = j.at("beam");
  c.seed = j.at("seed");
  return c;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Model& model) {
  nlohmann::json header;
  header["version"] = kCheckpointVersion;
  header["config"] = detail::config_json(model.config);
  header["scheme"] = model.scheme.name();
  header["seed"] = model.config.seed;
  header["vocab"] = {{"words", model.vocab.words}, {"tokens", model.vocab.tokens}};
  header["tensors"] = nlohmann::json::array();
  for (std::size_t i = 0; i < model.params.size(); ++i)
    header["tensors"].push_back(
        {{"name", model.params.name(i)}, {"rows", model.params[i].rows()}, {"cols", model.params[i].cols()}});
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out.write(detail::kMagic, sizeof(detail::kMagic));
  detail::write_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const Matrix& m = model.params[i];
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) detail::write_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
  }
  if (!out) throw CheckpointError("error writing " + path);
}

inline Model load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::string(magic, 8) != std::string(detail::kMagic, 8))
    throw CheckpointError(path + " is not a checkpoint");
  const std::uint64_t length = detail::read_u64(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) throw CheckpointError("truncated checkpoint header");

  Model model;
  try {
    const auto header = nlohmann::json::parse(text);
    if (header.at("version") != kCheckpointVersion)
      throw CheckpointError("unsupported checkpoint version " + header.at("version").dump());
    model.config = detail::config_from_json(header.at("config"));
    model.scheme = parse_scheme(header.at("scheme").get<std::string>());
    model.vocab.words = header.at("vocab").at("words").get<std::vector<std::string>>();
    model.vocab.tokens = header.at("vocab").at("tokens").get<std::vector<std::string>>();
    model.vocab.index();
    for (const auto& t : header.at("tensors")) {
      Matrix m(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = std::bit_cast<double>(detail::read_u64(in));
      model.params.add(t.at("name").get<std::string>(), std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  model.config.check();
  const Parameters expected = init_parameters(model.config, model.vocab, 0);
  if (expected.size() != model.params.size()) throw CheckpointError("checkpoint tensors do not match its config");
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (expected.name(i) != model.params.name(i) || expected[i].rows() != model.params[i].rows() ||
        expected[i].cols() != model.params[i].cols())
      throw CheckpointError("checkpoint tensor " + model.params.name(i) + " does not match its config");
  return model;
}

}  // namespace srseq::neural
