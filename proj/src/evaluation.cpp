#include "freqx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "freqx/errors.hpp"
#include "freqx/parallel.hpp"
#include "freqx/random.hpp"

namespace freqx {

double false_match_rate(std::span<const double> imposter, double threshold) {
  if (imposter.empty()) throw MetricError("FMR needs at least one imposter score");
  const auto accepted = std::count_if(imposter.begin(), imposter.end(), [&](double s) { return s >= threshold; });
  return static_cast<double>(accepted) / static_cast<double>(imposter.size());
}

double false_non_match_rate(std::span<const double> genuine, double threshold) {
  if (genuine.empty()) throw MetricError("FNMR needs at least one genuine score");
  const auto rejected = std::count_if(genuine.begin(), genuine.end(), [&](double s) { return s < threshold; });
  return static_cast<double>(rejected) / static_cast<double>(genuine.size());
}

EerResult compute_eer(const ScoreSet& scores) {
  if (scores.genuine.empty() || scores.imposter.empty()) {
    throw MetricError("EER needs both genuine and imposter scores");
  }
  std::vector<double> genuine = scores.genuine;
  std::vector<double> imposter = scores.imposter;
  std::sort(genuine.begin(), genuine.end());
  std::sort(imposter.begin(), imposter.end());

  std::vector<double> unique;
  unique.reserve(genuine.size() + imposter.size());
  std::merge(genuine.begin(), genuine.end(), imposter.begin(), imposter.end(), std::back_inserter(unique));
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  std::vector<double> candidates;
  candidates.reserve(unique.size() + 1);
  candidates.push_back(unique.front() - 1.0);
  for (std::size_t i = 0; i + 1 < unique.size(); ++i) candidates.push_back((unique[i] + unique[i + 1]) / 2.0);
  candidates.push_back(unique.back() + 1.0);

  const double n_gen = static_cast<double>(genuine.size());
  const double n_imp = static_cast<double>(imposter.size());
  EerResult best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const double t : candidates) {
    // Sorted lists: rejected genuines are those below t, accepted imposters those at or above.
    const auto rejected = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    const auto accepted = imposter.end() - std::lower_bound(imposter.begin(), imposter.end(), t);
    const double fnmr = static_cast<double>(rejected) / n_gen;
    const double fmr = static_cast<double>(accepted) / n_imp;
    const double gap = std::abs(fmr - fnmr);
    if (gap < best_gap) {
      best_gap = gap;
      best = {(fmr + fnmr) / 2.0, t};
    }
  }
  return best;
}

double threshold_at_fmr(const ScoreSet& scores, double target_fmr) {
  if (!(target_fmr > 0.0 && target_fmr < 1.0)) throw ParameterError("target FMR must lie in (0, 1)");
  if (scores.imposter.empty()) throw MetricError("threshold_at_fmr needs imposter scores");
  std::vector<double> desc = scores.imposter;
  std::sort(desc.begin(), desc.end(), std::greater<>());
  const std::size_t n = desc.size();
  const double n_d = static_cast<double>(n);

  // Largest number of accepted imposters whose rate stays within the target.
  std::size_t allowed = 0;
  while (allowed + 1 <= n && static_cast<double>(allowed + 1) / n_d <= target_fmr) ++allowed;
  // Everything strictly above desc[allowed] is accepted: at most `allowed` scores.
  return std::nextafter(desc[allowed], std::numeric_limits<double>::infinity());
}

std::string_view to_string(CurveDirection direction) {
  return direction == CurveDirection::Deletion ? "deletion" : "insertion";
}

std::string_view to_string(CurveMetric metric) { return metric == CurveMetric::Eer ? "eer" : "fnmr"; }

std::string_view to_string(OrderingSource source) {
  return source == OrderingSource::Influence ? "influence" : "random";
}

CurveDirection parse_curve_direction(std::string_view text) {
  if (text == "deletion") return CurveDirection::Deletion;
  if (text == "insertion") return CurveDirection::Insertion;
  throw ParameterError("unknown curve direction '" + std::string(text) + "' (expected deletion or insertion)");
}

CurveMetric parse_curve_metric(std::string_view text) {
  if (text == "eer" || text == "EER") return CurveMetric::Eer;
  if (text == "fnmr" || text == "FNMR") return CurveMetric::FnmrAtThreshold;
  throw ParameterError("unknown curve metric '" + std::string(text) + "' (expected eer or fnmr)");
}

PairOrderings influence_orderings(const PairSource& pairs, const EmbeddingBackend& backend,
                                  const BandPartition& partition, std::size_t jobs) {
  PairOrderings result;
  result.orders.resize(pairs.size());
  std::vector<char> degenerate(pairs.size(), 0);
  parallel_for(pairs.size(), backend.thread_safe() ? jobs : 1, [&](std::size_t i) {
    const auto [a, b] = pairs.load(i);
    try {
      const InfluenceProfile profile = pair_influence(a, b, backend, partition);
      if (profile.degenerate) {
        degenerate[i] = 1;
      } else {
        result.orders[i] = influence_ordering(profile);
      }
    } catch (const DegenerateEmbeddingError&) {
      degenerate[i] = 1;
    }
  });
  result.degenerate_count = static_cast<std::size_t>(std::count(degenerate.begin(), degenerate.end(), 1));
  return result;
}

std::vector<std::size_t> random_ordering(std::size_t band_count, std::uint64_t seed, std::size_t pair_index) {
  return seeded_permutation(band_count, mix_seed(seed, pair_index));
}

EvalCurve run_curve(const PairSource& pairs, const EmbeddingBackend& backend, const BandPartition& partition,
                    const CurveOptions& options, const PairOrderings* precomputed) {
  if (pairs.size() == 0) throw MetricError("run_curve: no pairs");
  const std::size_t bands = partition.band_count();
  const std::size_t jobs = backend.thread_safe() ? options.jobs : 1;

  PairOrderings orderings;
  if (options.ordering == OrderingSource::Influence) {
    orderings = precomputed ? *precomputed : influence_orderings(pairs, backend, partition, jobs);
    if (orderings.orders.size() != pairs.size()) throw ParameterError("run_curve: orderings do not match pairs");
  } else {
    orderings.orders.resize(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) orderings.orders[i] = random_ordering(bands, options.seed, i);
  }

  std::vector<std::size_t> included;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!orderings.orders[i].empty()) included.push_back(i);
  }

  // scores[step][k] for included pair k.
  std::vector<std::vector<double>> scores(bands + 1, std::vector<double>(included.size()));
  parallel_for(included.size(), jobs, [&](std::size_t k) {
    const std::size_t i = included[k];
    const auto [a, b] = pairs.load(i);
    const auto& order = orderings.orders[i];
    const Embedding ea = backend.embed(a);
    const Embedding eb = backend.embed(b);
    const double unaltered = masked_pair_score(ea, eb);
    const SpectralImage spec_a = forward_transform(a);
    const SpectralImage spec_b = forward_transform(b);

    for (std::size_t step = 0; step <= bands; ++step) {
      std::vector<std::size_t> removed;
      if (options.direction == CurveDirection::Deletion) {
        removed.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(step));
      } else {
        removed.assign(order.begin() + static_cast<std::ptrdiff_t>(step), order.end());
      }
      if (removed.empty()) {
        scores[step][k] = unaltered;
        continue;
      }
      const FrequencyMask mask = build_union_mask(partition, removed);
      const SpatialImage ma = inverse_transform(apply_mask(spec_a, mask));
      const SpatialImage mb = inverse_transform(apply_mask(spec_b, mask));
      scores[step][k] = masked_pair_score(backend.embed(ma), backend.embed(mb));
    }
  });

  auto score_set = [&](std::size_t step) {
    ScoreSet set;
    for (std::size_t k = 0; k < included.size(); ++k) {
      (pairs.label(included[k]) == PairLabel::Genuine ? set.genuine : set.imposter).push_back(scores[step][k]);
    }
    return set;
  };

  EvalCurve curve;
  curve.direction = options.direction;
  curve.metric = options.metric;
  curve.band_size = partition.band_size();
  curve.norm = partition.norm();
  curve.ordering = options.ordering;
  if (options.ordering == OrderingSource::Random) curve.seed = options.seed;
  curve.pair_count = included.size();
  curve.degenerate_count = orderings.degenerate_count;

  const std::size_t unaltered_step = options.direction == CurveDirection::Deletion ? 0 : bands;
  const ScoreSet unaltered = score_set(unaltered_step);
  if (unaltered.genuine.empty() || unaltered.imposter.empty()) {
    throw MetricError("run_curve: need at least one genuine and one imposter pair (after dropping " +
                      std::to_string(orderings.degenerate_count) + " degenerate)");
  }
  if (options.metric == CurveMetric::FnmrAtThreshold) {
    curve.threshold = threshold_at_fmr(unaltered, options.target_fmr);
  }

  for (std::size_t step = 0; step <= bands; ++step) {
    const ScoreSet set = step == unaltered_step ? unaltered : score_set(step);
    const double value = options.metric == CurveMetric::Eer ? compute_eer(set).eer
                                                            : false_non_match_rate(set.genuine, *curve.threshold);
    curve.points.push_back({static_cast<double>(step) / static_cast<double>(bands), value});
  }
  return curve;
}

double curve_auc(const EvalCurve& curve) {
  if (curve.points.size() < 2) throw MetricError("curve_auc: need at least two points");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i - 1];
    const auto& q = curve.points[i];
    area += (q.fraction - p.fraction) * (p.value + q.value) / 2.0;
  }
  return area;
}

}  // namespace freqx
