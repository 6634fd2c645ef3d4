#include "freqx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "freqx/errors.hpp"

namespace freqx {

std::string_view to_string(ChannelOrder order) { return order == ChannelOrder::RGB ? "RGB" : "BGR"; }

std::string_view to_string(Norm norm) { return norm == Norm::L1 ? "L1" : "L2"; }

Norm parse_norm(std::string_view text) {
  if (text == "L1" || text == "l1") return Norm::L1;
  if (text == "L2" || text == "l2") return Norm::L2;
  throw ParameterError("unknown norm '" + std::string(text) + "' (expected L1 or L2)");
}

ChannelOrder parse_channel_order(std::string_view text) {
  if (text == "RGB" || text == "rgb") return ChannelOrder::RGB;
  if (text == "BGR" || text == "bgr") return ChannelOrder::BGR;
  throw ParameterError("unknown channel order '" + std::string(text) + "' (expected RGB or BGR)");
}

// ---------------------------------------------------------------------------
// SpatialImage / SpectralImage

SpatialImage::SpatialImage(int height, int width, int channels, ChannelOrder order)
    : SpatialImage(height, width, channels,
                   std::vector<double>(static_cast<std::size_t>(std::max(height, 0)) *
                                       std::max(width, 0) * std::max(channels, 0)),
                   order) {}

SpatialImage::SpatialImage(int height, int width, int channels, std::vector<double> pixels,
                           ChannelOrder order)
    : height_(height), width_(width), channels_(channels), order_(order), pixels_(std::move(pixels)) {
  if (height <= 0 || width <= 0) throw DimensionError("image dimensions must be positive");
  if (channels != 1 && channels != 3) throw DimensionError("image must have 1 or 3 channels");
  if (pixels_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw DimensionError("pixel buffer does not match image dimensions");
  }
}

std::span<double> SpatialImage::channel(int c) {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<double>(pixels_).subspan(c * plane, plane);
}

std::span<const double> SpatialImage::channel(int c) const {
  const std::size_t plane = static_cast<std::size_t>(height_) * width_;
  return std::span<const double>(pixels_).subspan(c * plane, plane);
}

double SpatialImage::channel_mean(int c) const {
  const auto values = channel(c);
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

SpectralImage::SpectralImage(int size, int channels, bool centered, ChannelOrder order)
    : size_(size), channels_(channels), centered_(centered), order_(order),
      coeffs_(static_cast<std::size_t>(size) * size * channels) {
  if (size <= 0 || channels <= 0) throw DimensionError("spectrum dimensions must be positive");
}

std::span<Complex> SpectralImage::channel(int c) {
  const std::size_t plane = static_cast<std::size_t>(size_) * size_;
  return std::span<Complex>(coeffs_).subspan(c * plane, plane);
}

std::span<const Complex> SpectralImage::channel(int c) const {
  const std::size_t plane = static_cast<std::size_t>(size_) * size_;
  return std::span<const Complex>(coeffs_).subspan(c * plane, plane);
}

const Complex& SpectralImage::dc(int c) const {
  const int pos = centered_ ? size_ / 2 : 0;
  return at(c, pos, pos);
}

// ---------------------------------------------------------------------------
// Transforms

namespace {

// Moves index i to (i + shift) mod n along both axes.
void roll(std::span<Complex> plane, int n, int shift) {
  std::vector<Complex> tmp(plane.begin(), plane.end());
  for (int r = 0; r < n; ++r) {
    const int rr = (r + shift) % n;
    for (int c = 0; c < n; ++c) {
      plane[rr * n + (c + shift) % n] = tmp[r * n + c];
    }
  }
}

}  // namespace

SpectralImage forward_transform(const SpatialImage& img) {
  if (!img.is_square()) {
    throw DimensionError("forward_transform: image must be square, got " +
                         std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  const int n = img.size();
  if (n < 2) throw DimensionError("forward_transform: image side must be at least 2");

  SpectralImage spec(n, img.channels(), true, img.channel_order());
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (int c = 0; c < img.channels(); ++c) {
    auto plane = spec.channel(c);
    const auto src = img.channel(c);
    std::transform(src.begin(), src.end(), plane.begin(), [](double v) { return Complex(v, 0.0); });
    fft2d(plane, n, n, false);
    for (auto& v : plane) v *= scale;
    roll(plane, n, n / 2);
  }
  return spec;
}

Reconstruction inverse_transform_checked(const SpectralImage& spec) {
  const int n = spec.size();
  Reconstruction result{SpatialImage(n, n, spec.channels(), spec.channel_order()), 0.0};
  double max_imag = 0.0;
  double max_abs = 0.0;
  std::vector<Complex> plane(static_cast<std::size_t>(n) * n);
  for (int c = 0; c < spec.channels(); ++c) {
    const auto src = spec.channel(c);
    std::copy(src.begin(), src.end(), plane.begin());
    // Undo the centering: (n - n/2) == n/2 for even n, and the general form
    // is also correct for odd n.
    if (spec.centered()) roll(plane, n, n - n / 2);
    fft2d(plane, n, n, true);
    auto dst = result.image.channel(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      dst[i] = plane[i].real();
      max_imag = std::max(max_imag, std::abs(plane[i].imag()));
      max_abs = std::max(max_abs, std::abs(plane[i]));
    }
  }
  result.imaginary_residue = max_abs > 0.0 ? max_imag / max_abs : 0.0;
  return result;
}

SpatialImage inverse_transform(const SpectralImage& spec) {
  auto result = inverse_transform_checked(spec);
  if (result.imaginary_residue > 1e-9) {
    throw SymmetryError("inverse_transform: spectrum is not conjugate-symmetric (relative "
                        "imaginary residue " + std::to_string(result.imaginary_residue) + ")");
  }
  return std::move(result.image);
}

// ---------------------------------------------------------------------------
// Bands and masks

double coordinate_radius(int row, int col, int n, Norm norm) {
  const double dr = row - n / 2;
  const double dc = col - n / 2;
  return norm == Norm::L1 ? std::abs(dr) + std::abs(dc) : std::sqrt(dr * dr + dc * dc);
}

bool BandSpec::contains(int row, int col, int n) const {
  const long long dr = row - n / 2;
  const long long dc = col - n / 2;
  if (norm == Norm::L1) {
    const double r = static_cast<double>(std::llabs(dr) + std::llabs(dc));
    return r > lower && r <= upper;
  }
  const double r2 = static_cast<double>(dr * dr + dc * dc);
  return r2 > lower * lower && r2 <= upper * upper;
}

BandPartition build_partition(int n, double band_size, Norm norm) {
  if (n < 2 || n % 2 != 0) throw ParameterError("build_partition: N must be even and >= 2");
  const double half = n / 2.0;
  if (!(band_size > 0.0) || band_size > half) {
    throw ParameterError("build_partition: band size must lie in (0, N/2]");
  }

  BandPartition partition;
  partition.n_ = n;
  partition.norm_ = norm;
  partition.band_size_ = band_size;

  const auto count = static_cast<std::size_t>(std::ceil(half / band_size - 1e-12));
  for (std::size_t j = 0; j < count; ++j) {
    const double lower = static_cast<double>(j) * band_size;
    const double upper = j + 1 == count ? half : std::min(half, (j + 1) * band_size);
    partition.bands_.push_back({lower, upper, norm});
  }

  auto index = std::make_shared<std::vector<int>>(static_cast<std::size_t>(n) * n, -1);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (row == n / 2 && col == n / 2) continue;
      int assigned = static_cast<int>(count) - 1;  // corners beyond N/2
      for (std::size_t j = 0; j < count; ++j) {
        if (partition.bands_[j].contains(row, col, n)) {
          assigned = static_cast<int>(j);
          break;
        }
      }
      (*index)[row * n + col] = assigned;
    }
  }
  partition.band_index_ = std::move(index);
  return partition;
}

FrequencyMask::FrequencyMask(int size, std::vector<std::uint8_t> keep,
                             std::vector<std::size_t> removed_bands)
    : n_(size), keep_(std::move(keep)), removed_bands_(std::move(removed_bands)) {
  if (keep_.size() != static_cast<std::size_t>(size) * size) {
    throw DimensionError("mask values do not match mask size");
  }
}

FrequencyMask FrequencyMask::identity(int size) {
  return FrequencyMask(size, std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size, 1), {});
}

std::size_t FrequencyMask::removed_count() const {
  return static_cast<std::size_t>(std::count(keep_.begin(), keep_.end(), 0));
}

bool FrequencyMask::is_mirror_symmetric() const {
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      if (keep_[r * n_ + c] != keep_[((n_ - r) % n_) * n_ + (n_ - c) % n_]) return false;
    }
  }
  return true;
}

FrequencyMask build_mask(const BandPartition& partition, std::size_t band_index) {
  const std::size_t indices[] = {band_index};
  return build_union_mask(partition, indices);
}

FrequencyMask build_union_mask(const BandPartition& partition,
                               std::span<const std::size_t> band_indices) {
  std::vector<bool> removed(partition.band_count(), false);
  for (const auto j : band_indices) {
    if (j >= partition.band_count()) {
      throw ParameterError("band index " + std::to_string(j) + " out of range (" +
                           std::to_string(partition.band_count()) + " bands)");
    }
    removed[j] = true;
  }
  const auto map = partition.band_map();
  std::vector<std::uint8_t> keep(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    keep[i] = map[i] >= 0 && removed[map[i]] ? 0 : 1;
  }
  std::vector<std::size_t> listed(band_indices.begin(), band_indices.end());
  std::sort(listed.begin(), listed.end());
  listed.erase(std::unique(listed.begin(), listed.end()), listed.end());
  return FrequencyMask(partition.size(), std::move(keep), std::move(listed));
}

SpectralImage apply_mask(const SpectralImage& spec, const FrequencyMask& mask) {
  if (spec.size() != mask.size()) {
    throw DimensionError("apply_mask: spectrum is " + std::to_string(spec.size()) + "x" +
                         std::to_string(spec.size()) + " but mask is " + std::to_string(mask.size()) +
                         "x" + std::to_string(mask.size()));
  }
  if (!spec.centered()) throw DimensionError("apply_mask: spectrum must be centered");
  SpectralImage out = spec;
  const auto keep = mask.values();
  for (int c = 0; c < out.channels(); ++c) {
    auto plane = out.channel(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (!keep[i]) plane[i] = Complex(0.0, 0.0);
    }
  }
  return out;
}

SpatialImage mask_image(const SpatialImage& img, const FrequencyMask& mask) {
  return inverse_transform(apply_mask(forward_transform(img), mask));
}

double spectral_energy(const SpectralImage& spec) {
  double total = 0.0;
  for (const auto& v : spec.coeffs()) total += std::norm(v);
  return total;
}

double spatial_energy(const SpatialImage& img) {
  double total = 0.0;
  for (const double v : img.pixels()) total += v * v;
  return total;
}

std::vector<double> band_energies(const SpectralImage& spec, const BandPartition& partition) {
  if (spec.size() != partition.size()) throw DimensionError("band_energies: size mismatch");
  std::vector<double> energy(partition.band_count(), 0.0);
  const auto map = partition.band_map();
  for (int c = 0; c < spec.channels(); ++c) {
    const auto plane = spec.channel(c);
    for (std::size_t i = 0; i < plane.size(); ++i) {
      if (map[i] >= 0) energy[map[i]] += std::norm(plane[i]);
    }
  }
  return energy;
}

}  // namespace freqx
