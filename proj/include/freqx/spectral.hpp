#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "freqx/fft.hpp"

namespace freqx {

enum class ChannelOrder { RGB, BGR };
enum class Norm { L1, L2 };

std::string_view to_string(ChannelOrder order);
std::string_view to_string(Norm norm);
Norm parse_norm(std::string_view text);
ChannelOrder parse_channel_order(std::string_view text);

// Real-valued image, channel-planar storage: pixel (c, row, col) lives at
// c * height * width + row * width + col. Values are nominally 0-255 but are
// never clamped, since masked reconstructions may overshoot.
class SpatialImage {
 public:
  SpatialImage() = default;
  SpatialImage(int height, int width, int channels, ChannelOrder order = ChannelOrder::RGB);
  SpatialImage(int height, int width, int channels, std::vector<double> pixels,
               ChannelOrder order = ChannelOrder::RGB);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  ChannelOrder channel_order() const { return order_; }
  bool is_square() const { return height_ == width_; }
  // Side length of a square image.
  int size() const { return height_; }

  double& at(int c, int row, int col) { return pixels_[index(c, row, col)]; }
  double at(int c, int row, int col) const { return pixels_[index(c, row, col)]; }

  std::span<double> channel(int c);
  std::span<const double> channel(int c) const;
  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  double channel_mean(int c) const;

  friend bool operator==(const SpatialImage&, const SpatialImage&) = default;

 private:
  std::size_t index(int c, int row, int col) const {
    return (static_cast<std::size_t>(c) * height_ + row) * width_ + col;
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  ChannelOrder order_ = ChannelOrder::RGB;
  std::vector<double> pixels_;
};

// Per-channel N x N complex spectrum. When `centered` is set the zero
// frequency sits at (N/2, N/2).
class SpectralImage {
 public:
  SpectralImage() = default;
  SpectralImage(int size, int channels, bool centered, ChannelOrder order = ChannelOrder::RGB);

  int size() const { return size_; }
  int channels() const { return channels_; }
  bool centered() const { return centered_; }
  ChannelOrder channel_order() const { return order_; }

  Complex& at(int c, int k, int l) { return coeffs_[index(c, k, l)]; }
  const Complex& at(int c, int k, int l) const { return coeffs_[index(c, k, l)]; }

  std::span<Complex> channel(int c);
  std::span<const Complex> channel(int c) const;
  std::span<const Complex> coeffs() const { return coeffs_; }

  // Coefficient at the zero frequency, wherever it is stored.
  const Complex& dc(int c) const;

 private:
  std::size_t index(int c, int k, int l) const {
    return (static_cast<std::size_t>(c) * size_ + k) * size_ + l;
  }

  int size_ = 0;
  int channels_ = 0;
  bool centered_ = true;
  ChannelOrder order_ = ChannelOrder::RGB;
  std::vector<Complex> coeffs_;
};

// Frequency band (lower, upper]: lower bound exclusive, upper inclusive.
struct BandSpec {
  double lower = 0.0;
  double upper = 0.0;
  Norm norm = Norm::L2;

  double size() const { return upper - lower; }
  // lower < radius(row, col) <= upper on an N x N centered grid. L2 radii are
  // compared squared so integer distances land exactly on the bounds.
  bool contains(int row, int col, int n) const;
};

// Radius of the centered coordinate (row - N/2, col - N/2) under `norm`.
double coordinate_radius(int row, int col, int n, Norm norm);

// Consecutive, disjoint radius bands covering every non-DC coordinate of an
// N x N centered grid. Coordinates beyond radius N/2 (corners) belong to the
// last band.
class BandPartition {
 public:
  int size() const { return n_; }
  Norm norm() const { return norm_; }
  double band_size() const { return band_size_; }
  std::size_t band_count() const { return bands_.size(); }
  const std::vector<BandSpec>& bands() const { return bands_; }
  const BandSpec& band(std::size_t j) const { return bands_.at(j); }

  // Band index of centered coordinate (row, col), or -1 for DC.
  int band_of(int row, int col) const { return (*band_index_)[row * n_ + col]; }
  std::span<const int> band_map() const { return *band_index_; }

  friend bool operator==(const BandPartition& a, const BandPartition& b) {
    return a.n_ == b.n_ && a.norm_ == b.norm_ && a.band_size_ == b.band_size_;
  }

 private:
  friend BandPartition build_partition(int n, double band_size, Norm norm);

  int n_ = 0;
  Norm norm_ = Norm::L2;
  double band_size_ = 0.0;
  std::vector<BandSpec> bands_;
  std::shared_ptr<const std::vector<int>> band_index_;
};

// Binary keep/remove matrix over the centered grid (1 = keep, 0 = remove).
class FrequencyMask {
 public:
  FrequencyMask() = default;
  // Unchecked construction from raw values; see is_mirror_symmetric().
  FrequencyMask(int size, std::vector<std::uint8_t> keep, std::vector<std::size_t> removed_bands);

  static FrequencyMask identity(int size);

  int size() const { return n_; }
  bool keeps(int row, int col) const { return keep_[row * n_ + col] != 0; }
  std::span<const std::uint8_t> values() const { return keep_; }
  const std::vector<std::size_t>& removed_bands() const { return removed_bands_; }
  std::size_t removed_count() const;

  // True when mask(k, l) == mask(-k, -l) for every centered coordinate.
  bool is_mirror_symmetric() const;

 private:
  int n_ = 0;
  std::vector<std::uint8_t> keep_;
  std::vector<std::size_t> removed_bands_;
};

// Centered spectrum with 1/N^2 scaling; DC equals the channel mean.
SpectralImage forward_transform(const SpatialImage& img);

// Un-centers and applies the unscaled inverse sum; returns the real part.
// Throws SymmetryError if the imaginary residue exceeds 1e-9 of the largest
// output magnitude.
SpatialImage inverse_transform(const SpectralImage& spec);

// Relative imaginary residue of the last reconstruction, for diagnostics.
struct Reconstruction {
  SpatialImage image;
  double imaginary_residue = 0.0;  // max |imag| / max |value|
};
Reconstruction inverse_transform_checked(const SpectralImage& spec);

BandPartition build_partition(int n, double band_size, Norm norm);

FrequencyMask build_mask(const BandPartition& partition, std::size_t band_index);
// Removes every band listed; an empty list yields the identity mask.
FrequencyMask build_union_mask(const BandPartition& partition,
                               std::span<const std::size_t> band_indices);

SpectralImage apply_mask(const SpectralImage& spec, const FrequencyMask& mask);

SpatialImage mask_image(const SpatialImage& img, const FrequencyMask& mask);

// Sum of |coeff|^2 over all channels.
double spectral_energy(const SpectralImage& spec);
double spatial_energy(const SpatialImage& img);
// Spectral energy per band (DC excluded), summed over channels.
std::vector<double> band_energies(const SpectralImage& spec, const BandPartition& partition);

}  // namespace freqx
