#include <doctest.h>

#include <cmath>
#include <random>

#include "freqx/errors.hpp"
#include "freqx/evaluation.hpp"
#include "oracles.hpp"

using namespace freqx;
using freqx::testing::brute_force_eer;
using freqx::testing::brute_force_threshold;

namespace {

ScoreSet random_scores(std::mt19937_64& rng, std::size_t max_size, int levels) {
  std::uniform_int_distribution<std::size_t> size(1, max_size);
  std::uniform_int_distribution<int> level(0, levels);
  ScoreSet set;
  // Coarse levels force ties between and within classes.
  const std::size_t ng = size(rng);
  const std::size_t ni = size(rng);
  for (std::size_t i = 0; i < ng; ++i) set.genuine.push_back(static_cast<double>(level(rng)) / levels);
  for (std::size_t i = 0; i < ni; ++i) set.imposter.push_back(static_cast<double>(level(rng)) / levels - 0.2);
  return set;
}

EvalCurve curve_of(std::vector<double> values) {
  EvalCurve curve;
  for (std::size_t i = 0; i < values.size(); ++i) {
    curve.points.push_back({static_cast<double>(i) / static_cast<double>(values.size() - 1), values[i]});
  }
  return curve;
}

std::vector<LabeledPair> small_corpus(std::size_t genuine, std::size_t imposter, std::uint64_t seed) {
  return testing::synthetic_corpus({.n = 32, .genuine = genuine, .imposter = imposter, .view_noise = 10.0, .seed = seed});
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("FMR and FNMR by direct count") {
  const std::vector<double> imp{0.1, 0.2, 0.3, 0.4};
  const std::vector<double> gen{0.5, 0.6, 0.7, 0.8};
  CHECK(false_match_rate(imp, 0.3) == 0.5);
  CHECK(false_non_match_rate(gen, 0.65) == 0.5);
  CHECK(false_match_rate(imp, 0.41) == 0.0);
  CHECK_THROWS_AS(false_match_rate(std::vector<double>{}, 0.5), MetricError);
  CHECK_THROWS_AS(false_non_match_rate(std::vector<double>{}, 0.5), MetricError);
}

TEST_CASE("EER examples") {
  CHECK(compute_eer({{0.9, 0.9, 0.9}, {0.1, 0.1}}).eer == 0.0);
  CHECK(compute_eer({{0.3, 0.5, 0.7}, {0.3, 0.5, 0.7}}).eer == 0.5);
  const ScoreSet mixed{{0.8, 0.6, 0.4}, {0.7, 0.3, 0.2}};
  const auto got = compute_eer(mixed);
  const auto oracle = brute_force_eer(mixed);
  CHECK(got.eer == oracle.eer);
  CHECK(got.threshold == oracle.threshold);
  CHECK(got.eer == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(compute_eer({{0.5}, {}}), MetricError);
}

TEST_CASE("EER and threshold match brute-force sweeps") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 300; ++trial) {
    const auto set = random_scores(rng, 25, trial % 3 == 0 ? 5 : 1000);
    const auto got = compute_eer(set);
    const auto oracle = brute_force_eer(set);
    REQUIRE(got.eer == oracle.eer);
    REQUIRE(got.threshold == oracle.threshold);
    CHECK(got.eer >= 0.0);
    CHECK(got.eer <= 1.0);
    for (const double target : {0.05, 0.1, 0.25, 0.5}) {
      REQUIRE(threshold_at_fmr(set, target) == brute_force_threshold(set, target));
      CHECK(false_match_rate(set.imposter, threshold_at_fmr(set, target)) <= target);
    }
  }
}

TEST_CASE("rates are monotone in the threshold") {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto set = random_scores(rng, 40, 200);
    double prev_fmr = 2.0;
    double prev_fnmr = -1.0;
    for (double t = -1.5; t <= 1.5; t += 0.01) {
      const double fmr = false_match_rate(set.imposter, t);
      const double fnmr = false_non_match_rate(set.genuine, t);
      CHECK(fmr <= prev_fmr);
      CHECK(fnmr >= prev_fnmr);
      prev_fmr = fmr;
      prev_fnmr = fnmr;
    }
  }
}

TEST_CASE("threshold examples") {
  ScoreSet tenths;
  for (int i = 1; i <= 10; ++i) tenths.imposter.push_back(i / 10.0);
  const double t = threshold_at_fmr(tenths, 0.1);
  CHECK(t > 0.9);
  CHECK(t <= 1.0);
  CHECK(false_match_rate(tenths.imposter, t) == 0.1);

  const ScoreSet binary{{}, {0.0, 1.0}};
  const double half = threshold_at_fmr(binary, 0.5);
  CHECK(half > 0.0);
  CHECK(half <= 1.0);
  CHECK(false_match_rate(binary.imposter, half) == 0.5);

  const ScoreSet separated{{0.8, 0.9}, {0.1, 0.2, 0.3}};
  CHECK(false_non_match_rate(separated.genuine, threshold_at_fmr(separated, 0.3)) == 0.0);

  CHECK_THROWS_AS(threshold_at_fmr(separated, 0.0), ParameterError);
  CHECK_THROWS_AS(threshold_at_fmr(separated, 1.0), ParameterError);
}

TEST_CASE("AUC examples") {
  CHECK(curve_auc(curve_of({0.3, 0.3, 0.3})) == doctest::Approx(0.3));
  CHECK(curve_auc(curve_of({0.0, 0.5, 1.0})) == doctest::Approx(0.5));
  // Hand trapezoids over f = 0, 0.25, 0.5, 0.75, 1.
  const double hand = 0.25 * ((0.1 + 0.4) + (0.4 + 0.2) + (0.2 + 0.5) + (0.5 + 0.5)) / 2.0;
  CHECK(curve_auc(curve_of({0.1, 0.4, 0.2, 0.5, 0.5})) == doctest::Approx(hand).epsilon(1e-15));
  CHECK_THROWS_AS(curve_auc(curve_of({0.2})), MetricError);
}

TEST_CASE("random orderings are seeded permutations") {
  const auto a = random_ordering(7, 42, 3);
  CHECK(a == random_ordering(7, 42, 3));
  CHECK(a != random_ordering(7, 42, 4));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t j = 0; j < 7; ++j) CHECK(sorted[j] == j);
}

TEST_CASE("curve endpoints equal the unaltered metric") {
  const auto partition = build_partition(32, 4, Norm::L2);
  const auto backend = seeded_projection_embedder(21, 64);
  const InMemoryPairs pairs(small_corpus(5, 5, 97));
  ScoreSet unaltered;
  for (const auto& p : pairs.pairs()) {
    const double cs = cosine_similarity(backend->embed(p.a), backend->embed(p.b));
    (p.label == PairLabel::Genuine ? unaltered.genuine : unaltered.imposter).push_back(cs);
  }
  const double eer = compute_eer(unaltered).eer;
  const auto deletion = run_curve(pairs, *backend, partition, {.direction = CurveDirection::Deletion});
  const auto insertion = run_curve(pairs, *backend, partition, {.direction = CurveDirection::Insertion});
  CHECK(deletion.points.size() == partition.band_count() + 1);
  CHECK(deletion.points.front().value == eer);
  CHECK(insertion.points.back().value == eer);
  CHECK(insertion.points.back().fraction == 1.0);

  const auto fnmr = run_curve(pairs, *backend, partition,
                              {.metric = CurveMetric::FnmrAtThreshold, .ordering = OrderingSource::Random, .seed = 5});
  REQUIRE(fnmr.threshold.has_value());
  CHECK(*fnmr.threshold == threshold_at_fmr(unaltered, 0.1));
  CHECK(fnmr.points.front().value == false_non_match_rate(unaltered.genuine, *fnmr.threshold));
  CHECK(fnmr.seed == std::optional<std::uint64_t>(5));
}

TEST_CASE("single-band toy deletion jumps to chance and stays") {
  const auto partition = build_partition(32, 4, Norm::L2);
  const auto toy = spectral_toy_embedder({1}, partition);
  const InMemoryPairs pairs(small_corpus(6, 6, 101));
  const auto curve = run_curve(pairs, *toy, partition, {});
  CHECK(curve.degenerate_count == 0);
  CHECK(curve.points[0].value < 0.5);
  for (std::size_t i = 1; i < curve.points.size(); ++i) CHECK(curve.points[i].value == 0.5);
}

TEST_CASE("curves are independent of the job count") {
  const auto partition = build_partition(32, 8, Norm::L1);
  const auto toy = spectral_toy_embedder({0, 1}, partition);
  const InMemoryPairs pairs(small_corpus(4, 4, 103));
  const auto serial = run_curve(pairs, *toy, partition, {.ordering = OrderingSource::Random, .seed = 9, .jobs = 1});
  const auto parallel = run_curve(pairs, *toy, partition, {.ordering = OrderingSource::Random, .seed = 9, .jobs = 3});
  REQUIRE(serial.points.size() == parallel.points.size());
  for (std::size_t i = 0; i < serial.points.size(); ++i) CHECK(serial.points[i].value == parallel.points[i].value);
}

TEST_CASE("degenerate pairs are dropped from influence curves") {
  const auto partition = build_partition(32, 8, Norm::L2);
  const auto toy = spectral_toy_embedder({0}, partition);
  auto corpus = small_corpus(3, 3, 107);
  // A constant pair has no energy in band 0, so its profile is degenerate.
  corpus.push_back({testing::constant_image(32, 10.0), testing::constant_image(32, 10.0), PairLabel::Genuine, {}});
  const InMemoryPairs pairs(std::move(corpus));
  const auto curve = run_curve(pairs, *toy, partition, {});
  CHECK(curve.degenerate_count == 1);
  CHECK(curve.pair_count == 6);
  const auto random = run_curve(pairs, *toy, partition, {.ordering = OrderingSource::Random});
  CHECK(random.pair_count == 7);
}

TEST_CASE("curves need both labels") {
  const auto partition = build_partition(32, 8, Norm::L2);
  const auto backend = seeded_projection_embedder(1, 16);
  const InMemoryPairs genuine_only(small_corpus(2, 0, 109));
  CHECK_THROWS_AS(run_curve(genuine_only, *backend, partition, {}), MetricError);
  CHECK_THROWS_AS(run_curve(InMemoryPairs({}), *backend, partition, {}), MetricError);
}

}
