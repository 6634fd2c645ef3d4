#include "freqx/selftest.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "freqx/embedder.hpp"
#include "freqx/evaluation.hpp"
#include "freqx/explain.hpp"
#include "freqx/spectral.hpp"

namespace freqx {

namespace {

SpatialImage random_image(std::mt19937_64& rng, int n, int channels) {
  std::uniform_real_distribution<double> dist(0.0, 255.0);
  SpatialImage img(n, n, channels);
  for (auto& v : img.pixels()) v = dist(rng);
  return img;
}

// Direct double sum with 1/N^2 scaling, uncentered.
Complex naive_dft(const SpatialImage& img, int c, int k, int l) {
  const int n = img.size();
  Complex acc(0.0, 0.0);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double angle = -2.0 * std::numbers::pi * (static_cast<double>(k * x) / n + static_cast<double>(l * y) / n);
      acc += img.at(c, x, y) * Complex(std::cos(angle), std::sin(angle));
    }
  }
  return acc / static_cast<double>(n * n);
}

SelftestResult check_round_trip(std::mt19937_64& rng) {
  double worst_round_trip = 0.0;
  double worst_dft = 0.0;
  for (const int n : {4, 8, 16, 112}) {
    for (const int channels : {1, 3}) {
      const SpatialImage img = random_image(rng, n, channels);
      const SpectralImage spec = forward_transform(img);
      const SpatialImage back = inverse_transform(spec);
      for (std::size_t i = 0; i < img.pixels().size(); ++i) {
        worst_round_trip = std::max(worst_round_trip, std::abs(img.pixels()[i] - back.pixels()[i]));
      }
      if (n <= 8) {
        for (int c = 0; c < channels; ++c) {
          for (int k = 0; k < n; ++k) {
            for (int l = 0; l < n; ++l) {
              const Complex expected = naive_dft(img, c, k, l);
              const Complex got = spec.at(c, (k + n / 2) % n, (l + n / 2) % n);
              worst_dft = std::max(worst_dft, std::abs(expected - got));
            }
          }
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "max round-trip error " << worst_round_trip << ", max DFT deviation " << worst_dft;
  return {"round-trip", worst_round_trip < 1e-6 && worst_dft < 1e-9, detail.str()};
}

SelftestResult check_partition() {
  std::ostringstream problems;
  for (const Norm norm : {Norm::L1, Norm::L2}) {
    for (const int s : {1, 2, 4, 8, 14}) {
      const BandPartition partition = build_partition(112, s, norm);
      const auto expected = static_cast<std::size_t>((56 + s - 1) / s);
      if (partition.band_count() != expected) problems << to_string(norm) << " s=" << s << ": band count; ";
      std::vector<int> hits(112 * 112, 0);
      for (std::size_t j = 0; j < partition.band_count(); ++j) {
        const FrequencyMask mask = build_mask(partition, j);
        if (!mask.keeps(56, 56)) problems << to_string(norm) << " s=" << s << ": DC masked; ";
        if (!mask.is_mirror_symmetric()) problems << to_string(norm) << " s=" << s << ": asymmetric mask; ";
        for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += mask.values()[i] == 0;
      }
      for (std::size_t i = 0; i < hits.size(); ++i) {
        const int want = i == 56 * 112 + 56 ? 0 : 1;
        if (hits[i] != want) {
          problems << to_string(norm) << " s=" << s << ": coordinate " << i << " covered " << hits[i] << " times; ";
          break;
        }
      }
    }
  }
  const std::string text = problems.str();
  return {"partition", text.empty(), text.empty() ? "both norms, s in {1,2,4,8,14}, N=112" : text};
}

SelftestResult check_realness(std::mt19937_64& rng, bool inject) {
  const SpatialImage img = random_image(rng, 112, 3);
  const SpectralImage spec = forward_transform(img);
  double worst = 0.0;
  bool symmetric = true;
  for (const int s : {1, 2, 4, 8, 14}) {
    const BandPartition partition = build_partition(112, s, Norm::L2);
    for (std::size_t j = 0; j < partition.band_count(); ++j) {
      FrequencyMask mask = build_mask(partition, j);
      if (inject && s == 8 && j == 0) {
        std::vector<std::uint8_t> values(mask.values().begin(), mask.values().end());
        values[57 * 112 + 58] ^= 1;  // centered coordinate (1, 2), mirror left intact
        mask = FrequencyMask(112, std::move(values), mask.removed_bands());
      }
      symmetric = symmetric && mask.is_mirror_symmetric();
      worst = std::max(worst, inverse_transform_checked(apply_mask(spec, mask)).imaginary_residue);
    }
  }
  std::ostringstream detail;
  detail << "max relative imaginary residue " << worst << (symmetric ? "" : ", asymmetric mask found");
  return {"realness", symmetric && worst < 1e-9, detail.str()};
}

SelftestResult check_parseval(std::mt19937_64& rng) {
  double worst = 0.0;
  for (const int n : {4, 16, 112}) {
    const SpatialImage img = random_image(rng, n, 3);
    const double spatial = spatial_energy(img);
    const double spectral = spectral_energy(forward_transform(img)) * n * n;
    worst = std::max(worst, std::abs(spatial - spectral) / spatial);
  }
  std::ostringstream detail;
  detail << "max relative deviation " << worst;
  return {"parseval", worst < 1e-6, detail.str()};
}

SelftestResult check_toy_oracle(std::mt19937_64& rng) {
  const BandPartition partition = build_partition(112, 8, Norm::L2);
  const std::set<std::size_t> supported{0, 1};
  const auto backend = spectral_toy_embedder(supported, partition);
  std::ostringstream problems;
  for (int trial = 0; trial < 3; ++trial) {
    const SpatialImage a = random_image(rng, 112, 3);
    const SpatialImage b = random_image(rng, 112, 3);
    const InfluenceProfile profile = pair_influence(a, b, *backend, partition);
    for (std::size_t j = 0; j < partition.band_count(); ++j) {
      const bool read = supported.count(j) > 0;
      if (read != (profile.absolute[j] != 0.0)) problems << "trial " << trial << " band " << j << "; ";
    }
  }
  const std::string text = problems.str();
  return {"toy-oracle", text.empty(), text.empty() ? "zero influence exactly outside bands {0,1}" : text};
}

SelftestResult check_eer_oracle(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<int> size(1, 20);
  int mismatches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    ScoreSet set;
    for (int i = size(rng); i > 0; --i) set.genuine.push_back(std::round(dist(rng) * 10) / 10);
    for (int i = size(rng); i > 0; --i) set.imposter.push_back(std::round(dist(rng) * 10) / 10);

    // Brute force: every distinct (FMR, FNMR) pair is reachable at some score
    // or just above the maximum; pick the smallest gap.
    std::vector<double> all = set.genuine;
    all.insert(all.end(), set.imposter.begin(), set.imposter.end());
    double best_gap = 2.0;
    double best_eer = 0.0;
    std::vector<double> thresholds = all;
    thresholds.push_back(*std::max_element(all.begin(), all.end()) + 1.0);
    std::sort(thresholds.begin(), thresholds.end());
    for (const double t : thresholds) {
      const double fmr = false_match_rate(set.imposter, t);
      const double fnmr = false_non_match_rate(set.genuine, t);
      if (std::abs(fmr - fnmr) < best_gap) {
        best_gap = std::abs(fmr - fnmr);
        best_eer = (fmr + fnmr) / 2.0;
      }
    }
    if (compute_eer(set).eer != best_eer) ++mismatches;
  }
  return {"eer-oracle", mismatches == 0, std::to_string(mismatches) + " mismatches over 50 score sets"};
}

template <typename F>
SelftestResult timed(F&& check) {
  const auto start = std::chrono::steady_clock::now();
  SelftestResult result = check();
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::vector<SelftestResult> run_selftest(const SelftestOptions& options) {
  std::mt19937_64 rng(20240901);
  std::vector<SelftestResult> results;
  auto guarded = [&](const char* name, auto&& check) {
    try {
      results.push_back(timed(check));
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  };
  guarded("round-trip", [&] { return check_round_trip(rng); });
  guarded("partition", [&] { return check_partition(); });
  guarded("realness", [&] { return check_realness(rng, options.inject_mask_asymmetry); });
  guarded("parseval", [&] { return check_parseval(rng); });
  guarded("toy-oracle", [&] { return check_toy_oracle(rng); });
  guarded("eer-oracle", [&] { return check_eer_oracle(rng); });
  return results;
}

}  // namespace freqx
