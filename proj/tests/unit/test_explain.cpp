#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "freqx/errors.hpp"
#include "freqx/explain.hpp"
#include "oracles.hpp"

using namespace freqx;
using freqx::testing::random_image;

namespace {

double sum_abs(const std::vector<double>& v) {
  double total = 0.0;
  for (const double x : v) total += std::abs(x);
  return total;
}

InfluenceProfile profile_from_absolute(std::vector<double> values) {
  const int n = 2 * static_cast<int>(values.size());
  return make_profile(build_partition(n, 1, Norm::L1), 0.5, std::move(values));
}

}  // namespace

TEST_SUITE("explain") {

TEST_CASE("make_profile normalizes and keeps signs") {
  const auto p = make_profile(build_partition(8, 2, Norm::L2), 0.7, {-0.2, 0.1, 0.0, -0.1});
  CHECK_FALSE(p.degenerate);
  CHECK(p.directed[0] == doctest::Approx(-0.5));
  CHECK(p.directed[1] == doctest::Approx(0.25));
  CHECK(p.directed[2] == 0.0);
  CHECK(p.absolute[3] == doctest::Approx(0.25));
  CHECK(std::abs(sum_abs(p.absolute) - 1.0) < 1e-12);
  for (std::size_t j = 0; j < 4; ++j) CHECK(p.absolute[j] == std::abs(p.directed[j]));

  const auto flat = make_profile(build_partition(8, 2, Norm::L2), 1.0, {0.0, 1e-14, 0.0, 0.0});
  CHECK(flat.degenerate);
  CHECK(sum_abs(flat.absolute) == 0.0);
  CHECK_THROWS_AS(influence_ordering(flat), OrderingUnavailableError);
}

TEST_CASE("toy embedder influence support is exact") {
  const auto partition = build_partition(112, 8, Norm::L2);
  const auto toy = spectral_toy_embedder({0, 1}, partition);
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 4; ++trial) {
    const auto a = random_image(rng, 112, 3);
    const auto b = random_image(rng, 112, 3);
    const auto profile = pair_influence(a, b, *toy, partition);
    REQUIRE_FALSE(profile.degenerate);
    for (std::size_t j = 0; j < partition.band_count(); ++j) {
      if (j < 2) {
        CHECK(profile.absolute[j] > 0.0);
      } else {
        CHECK(profile.absolute[j] == 0.0);
        CHECK(profile.raw_deltas[j] == 0.0);
      }
    }
    const auto order = influence_ordering(profile);
    CHECK(std::set<std::size_t>(order.begin(), order.begin() + 2) == std::set<std::size_t>{0, 1});
  }
}

TEST_CASE("single supported band is ranked first") {
  const auto partition = build_partition(112, 8, Norm::L2);
  const auto toy = spectral_toy_embedder({3}, partition);
  std::mt19937_64 rng(61);
  const auto profile = pair_influence(random_image(rng, 112, 3), random_image(rng, 112, 3), *toy, partition);
  const auto order = influence_ordering(profile);
  CHECK(order[0] == 3);
  CHECK(profile.absolute[3] == 1.0);
}

TEST_CASE("identical pair never gains similarity") {
  const auto partition = build_partition(16, 2, Norm::L2);
  const auto backend = seeded_projection_embedder(3, 32);
  std::mt19937_64 rng(67);
  const auto img = random_image(rng, 16, 3);
  const auto profile = pair_influence(img, img, *backend, partition);
  CHECK(profile.reference_score == 1.0);
  for (const double d : profile.raw_deltas) CHECK(d <= 0.0);
}

TEST_CASE("constant pair with the projection embedder is degenerate") {
  const auto partition = build_partition(16, 4, Norm::L2);
  const auto backend = seeded_projection_embedder(3, 32);
  const auto profile = pair_influence(testing::constant_image(16, 40.0), testing::constant_image(16, 200.0),
                                      *backend, partition);
  CHECK(profile.degenerate);
  for (const double v : profile.directed) CHECK(v == 0.0);
}

TEST_CASE("influence is symmetric in its image arguments") {
  const auto partition = build_partition(16, 2, Norm::L1);
  const auto backend = seeded_projection_embedder(13, 48);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_image(rng, 16, 3);
    const auto b = random_image(rng, 16, 3);
    const auto ab = pair_influence(a, b, *backend, partition);
    const auto ba = pair_influence(b, a, *backend, partition);
    CHECK(ab.raw_deltas == ba.raw_deltas);
    CHECK(ab.directed == ba.directed);
  }
}

TEST_CASE("parallel influence matches serial") {
  const auto partition = build_partition(16, 1, Norm::L2);
  const auto backend = seeded_projection_embedder(17, 32);
  std::mt19937_64 rng(73);
  const auto a = random_image(rng, 16, 3);
  const auto b = random_image(rng, 16, 3);
  CHECK(pair_influence(a, b, *backend, partition, 1).raw_deltas ==
        pair_influence(a, b, *backend, partition, 4).raw_deltas);
}

TEST_CASE("pair_influence rejects size mismatches") {
  const auto partition = build_partition(16, 2, Norm::L2);
  const auto backend = seeded_projection_embedder(1, 8);
  CHECK_THROWS_AS(pair_influence(SpatialImage(8, 8, 3), SpatialImage(16, 16, 3), *backend, partition),
                  DimensionError);
}

TEST_CASE("ordering examples") {
  CHECK(influence_ordering(profile_from_absolute({0.5, 0.3, 0.2})) == std::vector<std::size_t>{0, 1, 2});
  CHECK(influence_ordering(profile_from_absolute({0.25, 0.25, 0.5})) == std::vector<std::size_t>{2, 0, 1});
  CHECK(influence_ordering(profile_from_absolute({-0.1, 0.3, 0.0, -0.6})) == std::vector<std::size_t>{3, 1, 0, 2});
}

TEST_CASE("aggregate examples") {
  const auto single = profile_from_absolute({0.2, 0.8});
  const auto one = aggregate_profiles(std::vector{single}, InfluenceMode::Absolute);
  CHECK(one.mean == single.absolute);
  CHECK(one.std == std::vector<double>{0.0, 0.0});
  CHECK(one.count == 1);

  const std::vector profiles{profile_from_absolute({1, 0}), profile_from_absolute({0, 1})};
  const auto two = aggregate_profiles(profiles, InfluenceMode::Absolute);
  CHECK(two.mean == std::vector<double>{0.5, 0.5});
  CHECK(two.std == std::vector<double>{0.5, 0.5});

  const std::vector signed_profiles{profile_from_absolute({-1, 0}), profile_from_absolute({1, 0})};
  CHECK(aggregate_profiles(signed_profiles, InfluenceMode::Directed).mean == std::vector<double>{0.0, 0.0});
  CHECK(aggregate_profiles(signed_profiles, InfluenceMode::Absolute).mean == std::vector<double>{1.0, 0.0});

  CHECK_THROWS_AS(aggregate_profiles(std::vector<InfluenceProfile>{}, InfluenceMode::Absolute), ParameterError);
  const std::vector mixed{profile_from_absolute({1, 0}), make_profile(build_partition(4, 2, Norm::L2), 0.0, {1})};
  CHECK_THROWS_AS(aggregate_profiles(mixed, InfluenceMode::Absolute), ParameterError);
}

TEST_CASE("toy genuine aggregate concentrates on supported bands") {
  const auto partition = build_partition(32, 4, Norm::L2);
  const auto toy = spectral_toy_embedder({1, 2}, partition);
  std::mt19937_64 rng(79);
  std::vector<InfluenceProfile> profiles;
  for (int i = 0; i < 100; ++i) {
    const auto a = random_image(rng, 32, 3);
    const auto b = testing::noisy_view(a, rng, 10.0);
    profiles.push_back(pair_influence(a, b, *toy, partition));
  }
  const auto agg = aggregate_profiles(profiles, InfluenceMode::Absolute);
  CHECK(agg.mean[1] + agg.mean[2] == doctest::Approx(1.0));
  for (std::size_t j = 0; j < partition.band_count(); ++j) {
    if (j == 1 || j == 2) continue;
    CHECK(agg.mean[j] == 0.0);
    CHECK(agg.std[j] == 0.0);
  }
  CHECK(agg.std[1] < 0.25);
}

}
