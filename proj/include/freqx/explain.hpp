#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "freqx/embedder.hpp"
#include "freqx/spectral.hpp"

namespace freqx {

enum class InfluenceMode { Absolute, Directed };

std::string_view to_string(InfluenceMode mode);
InfluenceMode parse_influence_mode(std::string_view text);

// Frequency heat plot data for one image pair.
//
// raw_deltas[j] = cs_j - cs_ref, where cs_j is the similarity after removing
// band j from both images. Negative means the band supported the match.
// absolute[j] = |raw_deltas[j]| / sum|raw_deltas| and directed[j] keeps the
// sign; both are zero with `degenerate` set when sum|raw_deltas| < 1e-12.
struct InfluenceProfile {
  BandPartition partition;
  double reference_score = 0.0;
  std::vector<double> raw_deltas;
  std::vector<double> absolute;
  std::vector<double> directed;
  bool degenerate = false;

  const std::vector<double>& values(InfluenceMode mode) const {
    return mode == InfluenceMode::Absolute ? absolute : directed;
  }
};

struct AggregateProfile {
  std::vector<double> mean;
  std::vector<double> std;  // population standard deviation
  std::size_t count = 0;
  InfluenceMode mode = InfluenceMode::Absolute;
};

// Normalizes raw deltas into a profile (shared by pair_influence and tests).
InfluenceProfile make_profile(BandPartition partition, double reference_score,
                              std::vector<double> raw_deltas);

// Masks every band of `partition` on both images in turn and records the
// change in cosine similarity. `jobs` > 1 fans the embedding calls out when
// the backend is thread-safe; the result is identical either way.
InfluenceProfile pair_influence(const SpatialImage& a, const SpatialImage& b,
                                const EmbeddingBackend& backend, const BandPartition& partition,
                                std::size_t jobs = 1);

// Same as pair_influence, for callers that already hold both spectra.
InfluenceProfile pair_influence(const SpatialImage& a, const SpatialImage& b,
                                const SpectralImage& spec_a, const SpectralImage& spec_b,
                                const EmbeddingBackend& backend, const BandPartition& partition,
                                std::size_t jobs = 1);

// Band indices by decreasing absolute influence, ties to the lower band.
std::vector<std::size_t> influence_ordering(const InfluenceProfile& profile);

AggregateProfile aggregate_profiles(std::span<const InfluenceProfile> profiles, InfluenceMode mode);

}  // namespace freqx
