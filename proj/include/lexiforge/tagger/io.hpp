#pragma once

// Model container:
//   "LXFMODEL" | u32 version | u64 metadata length | metadata JSON |
//   tensors as little-endian f64, row-major, in metadata order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "lexiforge/tagger/model.hpp"

namespace lexiforge::tagger {

inline constexpr char kModelMagic[8] = {'L', 'X', 'F', 'M', 'O', 'D', 'E', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

namespace detail {

template <class T>
void write_le(std::ostream& out, T v) {
  static_assert(std::is_integral_v<T>);
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(v) >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) throw Error(ErrorCode::corrupt_state, "truncated model file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return static_cast<T>(v);
}

inline nlohmann::ordered_json cnn_to_json(const CnnConfig& c) {
  return {{"embed_dim", c.embed_dim},         {"kernel_a", c.kernel_a},
          {"kernel_b", c.kernel_b},           {"parallel_channels", c.parallel_channels},
          {"deep_layers", c.deep_layers},     {"deep_channels", c.deep_channels},
          {"deep_kernel", c.deep_kernel},     {"dropout", c.dropout}};
}

inline CnnConfig cnn_from_json(const nlohmann::ordered_json& j) {
  CnnConfig c;
  c.embed_dim = j.at("embed_dim");
  c.kernel_a = j.at("kernel_a");
  c.kernel_b = j.at("kernel_b");
  c.parallel_channels = j.at("parallel_channels");
  c.deep_layers = j.at("deep_layers");
  c.deep_channels = j.at("deep_channels");
  c.deep_kernel = j.at("deep_kernel");
  c.dropout = j.at("dropout");
  return c;
}

}  // namespace detail

inline nlohmann::ordered_json train_config_to_json(const TrainConfig& t) {
  return {{"optimizer", "adam"},     {"learning_rate", t.learning_rate}, {"batch_size", t.batch_size},
          {"max_epochs", t.max_epochs}, {"patience", t.patience},         {"seed", t.seed},
          {"min_freq", t.min_freq},  {"init_scale", t.init_scale},       {"beta1", t.beta1},
          {"beta2", t.beta2},        {"adam_eps", t.adam_eps}};
}

inline TrainConfig train_config_from_json(const nlohmann::ordered_json& j) {
  TrainConfig t;
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.max_epochs = j.value("max_epochs", t.max_epochs);
  t.patience = j.value("patience", t.patience);
  t.seed = j.value("seed", t.seed);
  t.min_freq = j.value("min_freq", t.min_freq);
  t.init_scale = j.value("init_scale", t.init_scale);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.adam_eps = j.value("adam_eps", t.adam_eps);
  return t;
}

// `extra` is stored verbatim under "info" (training history, scheme, ...).
inline void save_model(std::ostream& out, TaggerModel<double>& model,
                       const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
  nlohmann::ordered_json meta;
  meta["kind"] = to_string(model.kind());
  meta["labels"] = model.labels().names();
  meta["train_config"] = train_config_to_json(model.train_config());
  if (uses_cnn(model.kind())) {
    meta["cnn"] = detail::cnn_to_json(model.cnn_config());
    meta["vocab"] = {{"min_freq", model.vocab().min_freq()}, {"words", model.vocab().words()}};
  } else {
    meta["features"] = model.features().names();
  }
  auto tensors = nlohmann::ordered_json::array();
  for (auto* p : model.params()) tensors.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  meta["tensors"] = tensors;
  meta["info"] = extra;
  const std::string js = meta.dump();

  out.write(kModelMagic, sizeof kModelMagic);
  detail::write_le<std::uint32_t>(out, kModelVersion);
  detail::write_le<std::uint64_t>(out, js.size());
  out.write(js.data(), static_cast<std::streamsize>(js.size()));
  for (auto* p : model.params()) {
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      detail::write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p->value.data()[i]));
    }
  }
  if (!out) throw Error(ErrorCode::io, "failed writing model");
}

struct LoadedModel {
  TaggerModel<double> model;
  nlohmann::ordered_json info;
};

inline LoadedModel load_model(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::corrupt_state, "not a model file (bad magic)");
  }
  const auto version = detail::read_le<std::uint32_t>(in);
  if (version != kModelVersion) throw Error(ErrorCode::corrupt_state, "unsupported model version " + std::to_string(version));
  const auto len = detail::read_le<std::uint64_t>(in);
  if (len > (1ULL << 32)) throw Error(ErrorCode::corrupt_state, "implausible metadata length");
  std::string js(len, '\0');
  if (!in.read(js.data(), static_cast<std::streamsize>(len))) throw Error(ErrorCode::corrupt_state, "truncated metadata");

  LoadedModel out;
  try {
    const auto meta = nlohmann::ordered_json::parse(js);
    const auto kind = parse_model_kind(meta.at("kind").get<std::string>());
    if (meta.at("labels").get<std::vector<std::string>>() != default_labels().names()) {
      throw Error(ErrorCode::corrupt_state, "label set differs from this build");
    }
    const auto tc = train_config_from_json(meta.at("train_config"));
    CnnConfig cnn;
    Vocab vocab;
    FeatureIndex features;
    if (uses_cnn(kind)) {
      cnn = detail::cnn_from_json(meta.at("cnn"));
      vocab = Vocab::from_words(meta.at("vocab").at("words").get<std::vector<std::string>>(),
                                meta.at("vocab").at("min_freq").get<std::size_t>());
    } else {
      features = FeatureIndex::from_names(meta.at("features").get<std::vector<std::string>>());
    }
    out.model = TaggerModel<double>::empty(kind, std::move(vocab), std::move(features), cnn, tc);
    auto params = out.model.params();
    const auto& tensors = meta.at("tensors");
    if (tensors.size() != params.size()) throw Error(ErrorCode::corrupt_state, "tensor count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto* p = params[i];
      if (tensors[i].at("name") != p->name || tensors[i].at("rows") != p->value.rows() ||
          tensors[i].at("cols") != p->value.cols()) {
        throw Error(ErrorCode::corrupt_state, "tensor '" + p->name + "' has unexpected name or shape");
      }
      for (Eigen::Index k = 0; k < p->value.size(); ++k) {
        p->value.data()[k] = std::bit_cast<double>(detail::read_le<std::uint64_t>(in));
      }
    }
    out.info = meta.value("info", nlohmann::ordered_json::object());
  } catch (const nlohmann::ordered_json::exception& e) {
    throw Error(ErrorCode::corrupt_state, std::string("bad model metadata: ") + e.what());
  }
  return out;
}

inline void save_model_file(const std::string& path, TaggerModel<double>& model,
                            const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write model '" + path + "'");
  save_model(out, model, extra);
}

inline LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open model '" + path + "'");
  return load_model(in);
}

}  // namespace lexiforge::tagger
