#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "freqx/imaging.hpp"
#include "freqx/spectral.hpp"

namespace freqx {

struct Embedding {
  std::vector<double> values;
  std::string model_id;
};

// Standard cosine similarity. Throws DegenerateEmbeddingError on a zero
// vector and DimensionError on mismatched lengths.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const Embedding& a, const Embedding& b);

// Score of a masked pair. When masking removed everything an embedding reads
// (zero vector), the pair carries no identity evidence and scores 0.
inline constexpr double kVanishedEmbeddingScore = 0.0;
double masked_pair_score(const Embedding& a, const Embedding& b);

// Maps decoded pixels v to (v / 255 - mean[c]) / std[c] in the channel order
// the model expects.
struct PreprocessConfig {
  int expected_size = 112;  // 0 accepts any size
  ChannelOrder channel_order = ChannelOrder::RGB;
  std::array<double, 3> mean{0.5, 0.5, 0.5};
  std::array<double, 3> std{0.5, 0.5, 0.5};
  ResizePolicy resize_policy = ResizePolicy::Error;

  void validate() const;
};

// Returns a planar C x N x N float buffer in the configured channel order,
// resizing or rejecting images of the wrong size according to the policy.
std::vector<float> preprocess(const SpatialImage& img, const PreprocessConfig& cfg);

struct BackendDescriptor {
  std::string model_id;
  int embedding_dim = 0;  // 0 when it depends on the input size
  PreprocessConfig preprocess;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  // Pure function of (image, backend state).
  virtual Embedding embed(const SpatialImage& img) const = 0;
  virtual const BackendDescriptor& descriptor() const = 0;
  // False when concurrent embed() calls must be serialized by the caller.
  virtual bool thread_safe() const { return true; }
};

// Reads spectral magnitudes at every coordinate whose band is in `supported`
// and L2-normalizes them. Masking any other band cannot change the output.
// Magnitudes are snapped to a 2^-16 grid so that the forward/inverse round
// trip of a masked image reproduces unmasked coefficients bit for bit.
std::unique_ptr<EmbeddingBackend> spectral_toy_embedder(std::set<std::size_t> supported,
                                                        const BandPartition& partition);

// Seeded random linear map over the flattened preprocessed image, followed by
// L2 normalization. Map entries are generated on the fly from (seed, row,
// column), so no matrix is stored.
std::unique_ptr<EmbeddingBackend> seeded_projection_embedder(std::uint64_t seed, int dim,
                                                             PreprocessConfig cfg = {.expected_size = 0});

// JSON sidecar shipped next to an exported model.
struct ModelSidecar {
  std::string model_id;
  int embedding_dim = 0;
  int input_size = 112;
  ChannelOrder channel_order = ChannelOrder::RGB;
  std::array<double, 3> mean{0.5, 0.5, 0.5};
  std::array<double, 3> std{0.5, 0.5, 0.5};

  PreprocessConfig preprocess_config(ResizePolicy policy = ResizePolicy::Error) const;
};

ModelSidecar read_sidecar(const std::filesystem::path& path);
// `<model>.json` next to `<model>.onnx`.
std::filesystem::path default_sidecar_path(const std::filesystem::path& model_file);

// Runs an ONNX network through OpenCV's DNN module. Calls are serialized
// internally; thread_safe() reports false so callers do not fan out.
std::unique_ptr<EmbeddingBackend> external_model_embedder(const std::filesystem::path& model_file,
                                                          const ModelSidecar& sidecar,
                                                          ResizePolicy policy = ResizePolicy::Error);

}  // namespace freqx
