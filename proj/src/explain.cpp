#include "freqx/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "freqx/errors.hpp"
#include "freqx/parallel.hpp"

namespace freqx {

std::string_view to_string(InfluenceMode mode) {
  return mode == InfluenceMode::Absolute ? "absolute" : "directed";
}

InfluenceMode parse_influence_mode(std::string_view text) {
  if (text == "absolute") return InfluenceMode::Absolute;
  if (text == "directed") return InfluenceMode::Directed;
  throw ParameterError("unknown influence mode '" + std::string(text) + "' (expected absolute or directed)");
}

InfluenceProfile make_profile(BandPartition partition, double reference_score,
                              std::vector<double> raw_deltas) {
  InfluenceProfile profile;
  profile.partition = std::move(partition);
  profile.reference_score = reference_score;
  profile.raw_deltas = std::move(raw_deltas);
  const std::size_t n = profile.raw_deltas.size();
  profile.absolute.assign(n, 0.0);
  profile.directed.assign(n, 0.0);

  double total = 0.0;
  for (const double d : profile.raw_deltas) total += std::abs(d);
  if (total < 1e-12) {
    profile.degenerate = true;
    return profile;
  }
  for (std::size_t j = 0; j < n; ++j) {
    profile.directed[j] = profile.raw_deltas[j] / total;
    profile.absolute[j] = std::abs(profile.directed[j]);
  }
  return profile;
}

InfluenceProfile pair_influence(const SpatialImage& a, const SpatialImage& b,
                                const EmbeddingBackend& backend, const BandPartition& partition,
                                std::size_t jobs) {
  if (!a.is_square() || !b.is_square() || a.size() != partition.size() || b.size() != partition.size()) {
    throw DimensionError("pair_influence: images must be " + std::to_string(partition.size()) + "x" +
                         std::to_string(partition.size()) + " to match the partition");
  }
  return pair_influence(a, b, forward_transform(a), forward_transform(b), backend, partition, jobs);
}

InfluenceProfile pair_influence(const SpatialImage& a, const SpatialImage& b,
                                const SpectralImage& spec_a, const SpectralImage& spec_b,
                                const EmbeddingBackend& backend, const BandPartition& partition,
                                std::size_t jobs) {
  if (spec_a.size() != partition.size() || spec_b.size() != partition.size()) {
    throw DimensionError("pair_influence: spectrum size does not match the partition");
  }
  // The unaltered pair must produce valid embeddings; errors propagate.
  const double reference = cosine_similarity(backend.embed(a), backend.embed(b));

  const std::size_t bands = partition.band_count();
  std::vector<double> deltas(bands);
  parallel_for(bands, backend.thread_safe() ? jobs : 1, [&](std::size_t j) {
    const FrequencyMask mask = build_mask(partition, j);
    const SpatialImage masked_a = inverse_transform(apply_mask(spec_a, mask));
    const SpatialImage masked_b = inverse_transform(apply_mask(spec_b, mask));
    deltas[j] = masked_pair_score(backend.embed(masked_a), backend.embed(masked_b)) - reference;
  });
  return make_profile(partition, reference, std::move(deltas));
}

std::vector<std::size_t> influence_ordering(const InfluenceProfile& profile) {
  if (profile.degenerate) {
    throw OrderingUnavailableError("influence_ordering: profile is degenerate (no band changed the score)");
  }
  std::vector<std::size_t> order(profile.absolute.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return profile.absolute[x] > profile.absolute[y];
  });
  return order;
}

AggregateProfile aggregate_profiles(std::span<const InfluenceProfile> profiles, InfluenceMode mode) {
  if (profiles.empty()) throw ParameterError("aggregate_profiles: no profiles to aggregate");
  const BandPartition& partition = profiles.front().partition;
  for (const auto& p : profiles) {
    if (!(p.partition == partition)) throw ParameterError("aggregate_profiles: profiles use different partitions");
  }

  const std::size_t bands = partition.band_count();
  const double count = static_cast<double>(profiles.size());
  AggregateProfile result;
  result.mode = mode;
  result.count = profiles.size();
  result.mean.assign(bands, 0.0);
  result.std.assign(bands, 0.0);
  for (const auto& p : profiles) {
    const auto& v = p.values(mode);
    for (std::size_t j = 0; j < bands; ++j) result.mean[j] += v[j];
  }
  for (auto& m : result.mean) m /= count;
  for (const auto& p : profiles) {
    const auto& v = p.values(mode);
    for (std::size_t j = 0; j < bands; ++j) {
      const double d = v[j] - result.mean[j];
      result.std[j] += d * d;
    }
  }
  for (auto& s : result.std) s = std::sqrt(s / count);
  return result;
}

}  // namespace freqx
