#include "freqx/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "freqx/errors.hpp"
#include "freqx/random.hpp"

namespace freqx {

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionError("cosine_similarity: dimensions differ (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateEmbeddingError("cosine_similarity: zero embedding");
  // sqrt(na * nb) makes cs(v, v) exactly 1.
  const double cs = dot / std::sqrt(na * nb);
  return std::clamp(cs, -1.0, 1.0);
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  return cosine_similarity(a.values, b.values);
}

double masked_pair_score(const Embedding& a, const Embedding& b) {
  const auto is_zero = [](const Embedding& e) {
    return std::all_of(e.values.begin(), e.values.end(), [](double v) { return v == 0.0; });
  };
  if (a.values.size() == b.values.size() && (is_zero(a) || is_zero(b))) return kVanishedEmbeddingScore;
  return cosine_similarity(a, b);
}

void PreprocessConfig::validate() const {
  if (expected_size < 0) throw ParameterError("preprocess: expected_size must be >= 0");
  for (const double s : std) {
    if (s == 0.0 || !std::isfinite(s)) throw ParameterError("preprocess: std must be finite and nonzero");
  }
}

std::vector<float> preprocess(const SpatialImage& source, const PreprocessConfig& cfg) {
  cfg.validate();
  const SpatialImage* img = &source;
  SpatialImage resized;
  if (cfg.expected_size > 0 &&
      (source.height() != cfg.expected_size || source.width() != cfg.expected_size)) {
    if (cfg.resize_policy == ResizePolicy::Error) {
      throw DimensionError("preprocess: model expects " + std::to_string(cfg.expected_size) + "x" +
                           std::to_string(cfg.expected_size) + " input, got " +
                           std::to_string(source.height()) + "x" + std::to_string(source.width()));
    }
    resized = resize_bilinear(source, cfg.expected_size, cfg.expected_size);
    img = &resized;
  }

  const int channels = img->channels();
  const std::size_t plane = static_cast<std::size_t>(img->height()) * img->width();
  std::vector<float> out(plane * channels);
  const bool swap = channels == 3 && img->channel_order() != cfg.channel_order;
  for (int c = 0; c < channels; ++c) {
    const auto src = img->channel(swap ? 2 - c : c);
    const double mean = cfg.mean[c];
    const double scale = cfg.std[c];
    for (std::size_t i = 0; i < plane; ++i) {
      out[c * plane + i] = static_cast<float>((src[i] / 255.0 - mean) / scale);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral toy backend

namespace {

void l2_normalize(std::vector<double>& v) {
  const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
}

class SpectralToyEmbedder final : public EmbeddingBackend {
 public:
  SpectralToyEmbedder(std::set<std::size_t> supported, BandPartition partition)
      : supported_(std::move(supported)), partition_(std::move(partition)) {
    std::string id = "toy-spectral:";
    for (auto it = supported_.begin(); it != supported_.end(); ++it) {
      if (it != supported_.begin()) id += ',';
      id += std::to_string(*it);
    }
    const auto map = partition_.band_map();
    for (std::size_t i = 0; i < map.size(); ++i) {
      if (map[i] >= 0 && supported_.count(static_cast<std::size_t>(map[i]))) read_.push_back(i);
    }
    descriptor_.model_id = std::move(id);
    descriptor_.preprocess.expected_size = partition_.size();
  }

  Embedding embed(const SpatialImage& img) const override {
    if (!img.is_square() || img.size() != partition_.size()) {
      throw DimensionError("toy embedder: image side does not match the partition");
    }
    const SpectralImage spec = forward_transform(img);
    std::vector<double> values;
    values.reserve(read_.size() * spec.channels());
    constexpr double kGrid = 65536.0;
    for (int c = 0; c < spec.channels(); ++c) {
      const auto plane = spec.channel(c);
      for (const auto i : read_) values.push_back(std::round(std::abs(plane[i]) * kGrid) / kGrid);
    }
    l2_normalize(values);
    return {std::move(values), descriptor_.model_id};
  }

  const BackendDescriptor& descriptor() const override { return descriptor_; }

 private:
  std::set<std::size_t> supported_;
  BandPartition partition_;
  std::vector<std::size_t> read_;
  BackendDescriptor descriptor_;
};

class SeededProjectionEmbedder final : public EmbeddingBackend {
 public:
  SeededProjectionEmbedder(std::uint64_t seed, int dim, PreprocessConfig cfg) : seed_(seed) {
    descriptor_.model_id = "projection:" + std::to_string(seed) + ":" + std::to_string(dim);
    descriptor_.embedding_dim = dim;
    descriptor_.preprocess = cfg;
  }

  Embedding embed(const SpatialImage& img) const override {
    const std::vector<float> input = preprocess(img, descriptor_.preprocess);
    std::vector<double> values(descriptor_.embedding_dim);
    for (int row = 0; row < descriptor_.embedding_dim; ++row) {
      SplitMix64 stream(mix_seed(seed_, static_cast<std::uint64_t>(row)));
      double acc = 0.0;
      for (const float x : input) acc += stream.next_symmetric() * x;
      values[row] = acc;
    }
    l2_normalize(values);
    return {std::move(values), descriptor_.model_id};
  }

  const BackendDescriptor& descriptor() const override { return descriptor_; }

 private:
  std::uint64_t seed_;
  BackendDescriptor descriptor_;
};

}  // namespace

std::unique_ptr<EmbeddingBackend> spectral_toy_embedder(std::set<std::size_t> supported,
                                                        const BandPartition& partition) {
  if (supported.empty()) throw ParameterError("toy embedder: supported band set is empty");
  for (const auto j : supported) {
    if (j >= partition.band_count()) {
      throw ParameterError("toy embedder: band " + std::to_string(j) + " not in partition");
    }
  }
  return std::make_unique<SpectralToyEmbedder>(std::move(supported), partition);
}

std::unique_ptr<EmbeddingBackend> seeded_projection_embedder(std::uint64_t seed, int dim,
                                                             PreprocessConfig cfg) {
  if (dim < 2) throw ParameterError("projection embedder: dimension must be >= 2");
  cfg.validate();
  return std::make_unique<SeededProjectionEmbedder>(seed, dim, cfg);
}

// ---------------------------------------------------------------------------
// Sidecar

PreprocessConfig ModelSidecar::preprocess_config(ResizePolicy policy) const {
  PreprocessConfig cfg;
  cfg.expected_size = input_size;
  cfg.channel_order = channel_order;
  cfg.mean = mean;
  cfg.std = std;
  cfg.resize_policy = policy;
  return cfg;
}

namespace {

std::array<double, 3> read_triple(const nlohmann::json& value, const char* key) {
  if (value.is_number()) {
    const double v = value.get<double>();
    return {v, v, v};
  }
  if (value.is_array() && value.size() == 3) {
    return {value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
  }
  throw ModelError(std::string("sidecar: '") + key + "' must be a number or a 3-element array");
}

}  // namespace

ModelSidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model sidecar: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    ModelSidecar sidecar;
    sidecar.model_id = doc.at("model_id").get<std::string>();
    sidecar.embedding_dim = doc.at("embedding_dim").get<int>();
    sidecar.input_size = doc.at("input_size").get<int>();
    sidecar.channel_order = parse_channel_order(doc.at("channel_order").get<std::string>());
    sidecar.mean = read_triple(doc.at("mean"), "mean");
    sidecar.std = read_triple(doc.at("std"), "std");
    if (sidecar.embedding_dim < 1) throw ModelError("sidecar: embedding_dim must be positive");
    if (sidecar.input_size < 2) throw ModelError("sidecar: input_size must be >= 2");
    sidecar.preprocess_config().validate();
    return sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError("invalid model sidecar " + path.string() + ": " + e.what());
  }
}

std::filesystem::path default_sidecar_path(const std::filesystem::path& model_file) {
  auto sidecar = model_file;
  sidecar.replace_extension(".json");
  return sidecar;
}

}  // namespace freqx
