#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqx/embedder.hpp"
#include "freqx/explain.hpp"
#include "freqx/imaging.hpp"

namespace freqx {

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> imposter;
};

// Fraction of imposter scores >= threshold.
double false_match_rate(std::span<const double> imposter, double threshold);
// Fraction of genuine scores < threshold.
double false_non_match_rate(std::span<const double> genuine, double threshold);

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
};

// Sweeps the midpoints of the sorted unique scores plus one sentinel below and
// one above, picks the threshold minimizing |FMR - FNMR| (lowest threshold on
// ties) and reports (FMR + FNMR) / 2 there.
EerResult compute_eer(const ScoreSet& scores);

// Smallest representable threshold with FMR <= target_fmr.
double threshold_at_fmr(const ScoreSet& scores, double target_fmr);

enum class CurveDirection { Deletion, Insertion };
enum class CurveMetric { Eer, FnmrAtThreshold };
enum class OrderingSource { Influence, Random };

std::string_view to_string(CurveDirection direction);
std::string_view to_string(CurveMetric metric);
std::string_view to_string(OrderingSource source);
CurveDirection parse_curve_direction(std::string_view text);
CurveMetric parse_curve_metric(std::string_view text);

struct CurvePoint {
  double fraction = 0.0;
  double value = 0.0;
};

struct EvalCurve {
  CurveDirection direction = CurveDirection::Deletion;
  CurveMetric metric = CurveMetric::Eer;
  std::vector<CurvePoint> points;
  double band_size = 0.0;
  Norm norm = Norm::L2;
  std::optional<double> threshold;  // FNMR metric only
  OrderingSource ordering = OrderingSource::Influence;
  std::optional<std::uint64_t> seed;  // random ordering only
  std::size_t pair_count = 0;         // pairs that entered the curve
  std::size_t degenerate_count = 0;   // pairs dropped for a degenerate profile
};

// Lazily loaded image pairs, so large protocols need not sit in memory.
class PairSource {
 public:
  virtual ~PairSource() = default;
  virtual std::size_t size() const = 0;
  virtual PairLabel label(std::size_t index) const = 0;
  virtual std::pair<SpatialImage, SpatialImage> load(std::size_t index) const = 0;
};

struct LabeledPair {
  SpatialImage a;
  SpatialImage b;
  PairLabel label = PairLabel::Genuine;
  std::optional<std::string> tag;
};

class InMemoryPairs final : public PairSource {
 public:
  explicit InMemoryPairs(std::vector<LabeledPair> pairs) : pairs_(std::move(pairs)) {}
  std::size_t size() const override { return pairs_.size(); }
  PairLabel label(std::size_t index) const override { return pairs_.at(index).label; }
  std::pair<SpatialImage, SpatialImage> load(std::size_t index) const override {
    return {pairs_.at(index).a, pairs_.at(index).b};
  }
  const std::vector<LabeledPair>& pairs() const { return pairs_; }

 private:
  std::vector<LabeledPair> pairs_;
};

struct CurveOptions {
  CurveDirection direction = CurveDirection::Deletion;
  CurveMetric metric = CurveMetric::Eer;
  OrderingSource ordering = OrderingSource::Influence;
  std::uint64_t seed = 0;     // random ordering: per-pair streams derive from it
  double target_fmr = 0.1;    // FNMR metric: threshold frozen on unaltered scores
  std::size_t jobs = 1;
};

// Per-pair band orderings, precomputed once when several curves share them.
// Entry i is empty when pair i has a degenerate profile.
struct PairOrderings {
  std::vector<std::vector<std::size_t>> orders;
  std::size_t degenerate_count = 0;
};

PairOrderings influence_orderings(const PairSource& pairs, const EmbeddingBackend& backend,
                                  const BandPartition& partition, std::size_t jobs = 1);

// Random ordering of pair `pair_index`; depends only on (seed, pair_index).
std::vector<std::size_t> random_ordering(std::size_t band_count, std::uint64_t seed,
                                         std::size_t pair_index);

// Insertion/deletion curve with |bands| + 1 points at fractions j / |bands|.
// Deletion step j removes the pair's top-j bands from both images; insertion
// step j removes all bands except the top-j (step 0 leaves only DC).
EvalCurve run_curve(const PairSource& pairs, const EmbeddingBackend& backend,
                    const BandPartition& partition, const CurveOptions& options,
                    const PairOrderings* precomputed = nullptr);

// Trapezoidal area under (fraction, value).
double curve_auc(const EvalCurve& curve);

}  // namespace freqx
