#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "freqx/embedder.hpp"
#include "freqx/errors.hpp"
#include "oracles.hpp"

using namespace freqx;
using freqx::testing::random_image;

namespace {

const std::filesystem::path kData = FREQX_TEST_DATA;

SpatialImage probe_image() {
  SpatialImage img(16, 16, 3);
  for (int c = 0; c < 3; ++c) {
    for (int r = 0; r < 16; ++r) {
      for (int q = 0; q < 16; ++q) img.at(c, r, q) = (7 * r + 13 * q + 29 * c) % 256;
    }
  }
  return img;
}

std::vector<double> probe_reference() {
  std::ifstream in(kData / "tiny_embedder_probe.json");
  return nlohmann::json::parse(in).at("embedding").get<std::vector<double>>();
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << contents;
  return path;
}

}  // namespace

TEST_SUITE("embedder") {

TEST_CASE("cosine similarity examples") {
  const std::vector<double> a{1, 0};
  const std::vector<double> b{0, 1};
  const std::vector<double> c{-2, 0};
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, c) == -1.0);
  const std::vector<double> d{3, 4};
  CHECK(cosine_similarity(std::vector<double>{1, 0}, d) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{0, 0}), DegenerateEmbeddingError);
}

TEST_CASE("cosine similarity is symmetric, scale invariant and bounded") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(16), b(16), scaled(16);
    for (int i = 0; i < 16; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
    }
    const double k = std::exp(dist(rng));
    for (int i = 0; i < 16; ++i) scaled[i] = a[i] * k;
    const double cs = cosine_similarity(a, b);
    CHECK(cs == cosine_similarity(b, a));
    CHECK(std::abs(cs - cosine_similarity(scaled, b)) < 1e-12);
    CHECK(cs >= -1.0);
    CHECK(cs <= 1.0);
    CHECK(cosine_similarity(a, a) == 1.0);
  }
}

TEST_CASE("masked pair score maps a vanished embedding to zero") {
  const Embedding zero{{0, 0, 0}, "m"};
  const Embedding v{{1, 2, 3}, "m"};
  CHECK(masked_pair_score(zero, v) == kVanishedEmbeddingScore);
  CHECK(masked_pair_score(v, v) == 1.0);
}

TEST_CASE("toy embedder ignores bands it does not read") {
  const auto p = build_partition(112, 8, Norm::L2);
  const auto toy = spectral_toy_embedder({0}, p);
  CHECK(toy->descriptor().model_id == "toy-spectral:0");
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const auto img = random_image(rng, 112, 3);
    const auto reference = toy->embed(img).values;
    for (std::size_t j = 1; j < p.band_count(); ++j) {
      CHECK(toy->embed(mask_image(img, build_mask(p, j))).values == reference);
    }
    CHECK(toy->embed(mask_image(img, build_mask(p, 0))).values != reference);
  }
}

TEST_CASE("toy embedder validates its inputs") {
  const auto p = build_partition(16, 2, Norm::L2);
  CHECK_THROWS_AS(spectral_toy_embedder({}, p), ParameterError);
  CHECK_THROWS_AS(spectral_toy_embedder({4}, p), ParameterError);
  const auto toy = spectral_toy_embedder({0, 1}, p);
  CHECK(toy->descriptor().model_id == "toy-spectral:0,1");
  CHECK_THROWS_AS(toy->embed(SpatialImage(8, 8, 3)), DimensionError);
  // A constant image has no energy outside DC.
  const auto e = toy->embed(testing::constant_image(16, 90.0));
  for (const double v : e.values) CHECK(v == 0.0);
}

TEST_CASE("projection embedder is deterministic and seed dependent") {
  std::mt19937_64 rng(47);
  const auto img = random_image(rng, 8, 3);
  const auto a = seeded_projection_embedder(5, 64);
  const auto b = seeded_projection_embedder(5, 64);
  const auto c = seeded_projection_embedder(6, 64);
  CHECK(a->embed(img).values == b->embed(img).values);
  CHECK(a->embed(img).values != c->embed(img).values);
  CHECK(a->descriptor().model_id == "projection:5:64");
  CHECK_THROWS_AS(seeded_projection_embedder(1, 1), ParameterError);
}

TEST_CASE("projection embedder separates unrelated random images") {
  const auto backend = seeded_projection_embedder(9, 512);
  std::mt19937_64 rng(53);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_image(rng, 8, 3);
    const auto y = random_image(rng, 8, 3);
    worst = std::max(worst, std::abs(cosine_similarity(backend->embed(x), backend->embed(y))));
  }
  CHECK(worst < 0.5);
}

TEST_CASE("preprocess normalizes and swaps channels") {
  SpatialImage img(2, 2, 3);
  for (int c = 0; c < 3; ++c) {
    for (auto& v : img.channel(c)) v = 51.0 * (c + 1);
  }
  PreprocessConfig rgb{.expected_size = 2};
  const auto out = preprocess(img, rgb);
  CHECK(out[0] == doctest::Approx((51.0 / 255.0 - 0.5) / 0.5));
  CHECK(out[8] == doctest::Approx((153.0 / 255.0 - 0.5) / 0.5));

  PreprocessConfig bgr{.expected_size = 2, .channel_order = ChannelOrder::BGR};
  const auto swapped = preprocess(img, bgr);
  CHECK(swapped[0] == out[8]);
  CHECK(swapped[8] == out[0]);
  CHECK(swapped[4] == out[4]);

  CHECK_THROWS_AS(preprocess(SpatialImage(4, 4, 3), rgb), DimensionError);
  PreprocessConfig resize{.expected_size = 2, .resize_policy = ResizePolicy::Bilinear};
  CHECK(preprocess(SpatialImage(4, 4, 3), resize).size() == 12);
  PreprocessConfig bad{.std = {0.5, 0.0, 0.5}};
  CHECK_THROWS_AS(bad.validate(), ParameterError);
}

TEST_CASE("sidecar parsing") {
  const auto sidecar = read_sidecar(kData / "tiny_embedder.json");
  CHECK(sidecar.model_id == "tiny-embedder");
  CHECK(sidecar.embedding_dim == 8);
  CHECK(sidecar.input_size == 16);
  CHECK(sidecar.channel_order == ChannelOrder::RGB);
  CHECK(sidecar.mean[1] == 0.5);
  CHECK(default_sidecar_path("/models/net.onnx") == std::filesystem::path("/models/net.json"));

  const auto scalar = read_sidecar(temp_file(
      "freqx_scalar_sidecar.json",
      R"({"model_id":"x","embedding_dim":4,"input_size":112,"channel_order":"BGR","mean":0.25,"std":0.125})"));
  CHECK(scalar.channel_order == ChannelOrder::BGR);
  CHECK(scalar.mean[2] == 0.25);
  CHECK(scalar.std[0] == 0.125);

  CHECK_THROWS_AS(read_sidecar(temp_file("freqx_bad_sidecar.json", "{not json")), ModelError);
  CHECK_THROWS_AS(read_sidecar(temp_file("freqx_missing_sidecar.json", R"({"model_id":"x"})")), ModelError);
  CHECK_THROWS_AS(read_sidecar(kData / "does_not_exist.json"), IoError);
}

TEST_CASE("external model reproduces the reference probe embedding") {
  const auto sidecar = read_sidecar(kData / "tiny_embedder.json");
  const auto model = external_model_embedder(kData / "tiny_embedder.onnx", sidecar);
  CHECK_FALSE(model->thread_safe());
  const auto got = model->embed(probe_image());
  const auto expected = probe_reference();
  REQUIRE(got.values.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(got.values[i] - expected[i]) < 1e-4);
  CHECK(cosine_similarity(got.values, expected) >= 0.9999);
  CHECK(got.model_id == "tiny-embedder");

  // Deterministic, and an identity-masked image gives the same score.
  CHECK(model->embed(probe_image()).values == got.values);
  const auto masked = mask_image(probe_image(), FrequencyMask::identity(16));
  CHECK(cosine_similarity(model->embed(masked), got) >= 1.0 - 1e-6);

  CHECK_THROWS_AS(model->embed(SpatialImage(8, 8, 3)), DimensionError);
}

TEST_CASE("external model load failures") {
  const auto sidecar = read_sidecar(kData / "tiny_embedder.json");
  CHECK_THROWS_AS(external_model_embedder(kData / "missing.onnx", sidecar), IoError);
  CHECK_THROWS_AS(external_model_embedder(temp_file("freqx_garbage.onnx", "not a model"), sidecar), ModelError);
  auto wrong_dim = sidecar;
  wrong_dim.embedding_dim = 5;
  const auto model = external_model_embedder(kData / "tiny_embedder.onnx", wrong_dim);
  CHECK_THROWS_AS(model->embed(probe_image()), ModelError);
}

}
