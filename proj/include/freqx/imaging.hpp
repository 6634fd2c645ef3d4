#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqx/spectral.hpp"

namespace freqx {

// Collects non-fatal messages. Functions taking a `Warnings*` print to
// stderr when given nullptr.
struct Warnings {
  std::vector<std::string> messages;
};

void warn(Warnings* sink, std::string message);

enum class ResizePolicy { Error, Bilinear };

struct LoadOptions {
  int expected_size = 0;  // 0 accepts any size
  ResizePolicy resize_policy = ResizePolicy::Error;
};

// Decodes a PNG or JPEG into a 3-channel RGB image with values in [0, 255].
// Alpha is dropped and grayscale is replicated, both with a warning.
SpatialImage load_image(const std::filesystem::path& path, const LoadOptions& options = {},
                        Warnings* warnings = nullptr);

// Clamps to [0, 255] and rounds; only ever done at write time.
void write_image(const SpatialImage& img, const std::filesystem::path& path);

// Bilinear resampling with half-pixel centers and edge clamping:
//   src = (dst + 0.5) * in / out - 0.5, clamped to [0, in - 1].
SpatialImage resize_bilinear(const SpatialImage& img, int out_height, int out_width);

// Down-scales to floor(N * factor) and back up to N, both bilinear.
SpatialImage degrade_resolution(const SpatialImage& img, double factor);

enum class PairLabel { Genuine, Imposter };

std::string_view to_string(PairLabel label);

struct PairRecord {
  std::filesystem::path path_a;
  std::filesystem::path path_b;
  PairLabel label = PairLabel::Genuine;
  std::optional<std::string> tag;
};

// CSV with header `path_a,path_b,label[,tag]`. Relative paths resolve against
// the manifest's directory.
std::vector<PairRecord> read_manifest(const std::filesystem::path& path, Warnings* warnings = nullptr);

}  // namespace freqx
