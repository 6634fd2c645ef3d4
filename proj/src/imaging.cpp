#include "freqx/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "freqx/errors.hpp"

namespace freqx {

namespace fs = std::filesystem;

void warn(Warnings* sink, std::string message) {
  if (sink) {
    sink->messages.push_back(std::move(message));
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

SpatialImage load_image(const fs::path& path, const LoadOptions& options, Warnings* warnings) {
  if (!fs::exists(path)) throw IoError("image not found: " + path.string());
  const cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) throw IoError("cannot decode image: " + path.string());

  cv::Mat mat;
  raw.convertTo(mat, CV_64F, raw.depth() == CV_16U ? 255.0 / 65535.0 : 1.0);
  const int channels = mat.channels();
  if (channels == 4) {
    warn(warnings, path.string() + ": alpha channel dropped");
  } else if (channels == 1) {
    warn(warnings, path.string() + ": grayscale image replicated to 3 channels");
  } else if (channels != 3) {
    throw IoError(path.string() + ": unsupported channel count " + std::to_string(channels));
  }

  // OpenCV decodes to BGR(A); store as RGB.
  SpatialImage img(mat.rows, mat.cols, 3, ChannelOrder::RGB);
  for (int row = 0; row < mat.rows; ++row) {
    const double* src = mat.ptr<double>(row);
    for (int col = 0; col < mat.cols; ++col) {
      const double* px = src + static_cast<std::ptrdiff_t>(col) * channels;
      for (int c = 0; c < 3; ++c) {
        img.at(c, row, col) = channels == 1 ? px[0] : px[2 - c];
      }
    }
  }

  if (options.expected_size > 0 &&
      (img.height() != options.expected_size || img.width() != options.expected_size)) {
    if (options.resize_policy == ResizePolicy::Error) {
      throw DimensionError(path.string() + ": expected " + std::to_string(options.expected_size) +
                           "x" + std::to_string(options.expected_size) + ", got " +
                           std::to_string(img.height()) + "x" + std::to_string(img.width()));
    }
    img = resize_bilinear(img, options.expected_size, options.expected_size);
  }
  return img;
}

void write_image(const SpatialImage& img, const fs::path& path) {
  const int type = img.channels() == 1 ? CV_8UC1 : CV_8UC3;
  cv::Mat mat(img.height(), img.width(), type);
  const bool to_bgr = img.channel_order() == ChannelOrder::RGB;
  for (int row = 0; row < img.height(); ++row) {
    auto* dst = mat.ptr<std::uint8_t>(row);
    for (int col = 0; col < img.width(); ++col) {
      for (int c = 0; c < img.channels(); ++c) {
        const int src_c = img.channels() == 3 && to_bgr ? 2 - c : c;
        const double v = std::clamp(std::round(img.at(src_c, row, col)), 0.0, 255.0);
        dst[col * img.channels() + c] = static_cast<std::uint8_t>(v);
      }
    }
  }
  if (!cv::imwrite(path.string(), mat)) throw IoError("cannot write image: " + path.string());
}

SpatialImage resize_bilinear(const SpatialImage& img, int out_height, int out_width) {
  if (out_height <= 0 || out_width <= 0) throw DimensionError("resize target must be positive");
  SpatialImage out(out_height, out_width, img.channels(), img.channel_order());

  struct Tap {
    int i0, i1;
    double w1;
  };
  auto taps = [](int in, int out_len) {
    std::vector<Tap> result(out_len);
    const double scale = static_cast<double>(in) / out_len;
    for (int d = 0; d < out_len; ++d) {
      const double src = std::clamp((d + 0.5) * scale - 0.5, 0.0, static_cast<double>(in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, in - 1);
      result[d] = {i0, i1, src - i0};
    }
    return result;
  };
  const auto rows = taps(img.height(), out_height);
  const auto cols = taps(img.width(), out_width);

  for (int c = 0; c < img.channels(); ++c) {
    for (int r = 0; r < out_height; ++r) {
      const auto& tr = rows[r];
      for (int q = 0; q < out_width; ++q) {
        const auto& tc = cols[q];
        const double top = img.at(c, tr.i0, tc.i0) * (1.0 - tc.w1) + img.at(c, tr.i0, tc.i1) * tc.w1;
        const double bottom = img.at(c, tr.i1, tc.i0) * (1.0 - tc.w1) + img.at(c, tr.i1, tc.i1) * tc.w1;
        out.at(c, r, q) = top * (1.0 - tr.w1) + bottom * tr.w1;
      }
    }
  }
  return out;
}

SpatialImage degrade_resolution(const SpatialImage& img, double factor) {
  if (!(factor > 0.0 && factor < 1.0)) {
    throw ParameterError("degrade_resolution: factor must lie in (0, 1)");
  }
  if (!img.is_square()) throw DimensionError("degrade_resolution: image must be square");
  const int n = img.size();
  const int small = static_cast<int>(std::floor(n * factor));
  if (small < 2) {
    throw ParameterError("degrade_resolution: floor(N * factor) = " + std::to_string(small) +
                         " is below 2");
  }
  return resize_bilinear(resize_bilinear(img, small, small), n, n);
}

// ---------------------------------------------------------------------------
// Manifest

std::string_view to_string(PairLabel label) {
  return label == PairLabel::Genuine ? "genuine" : "imposter";
}

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Comma-separated fields; double quotes may wrap a field containing commas.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        current += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == ',' && !quoted) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current += ch;
    }
  }
  fields.push_back(trim(current));
  return fields;
}

}  // namespace

std::vector<PairRecord> read_manifest(const fs::path& path, Warnings* warnings) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool has_tag = false;
  std::vector<PairRecord> records;
  auto fail = [&](const std::string& what) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (!have_header) {
      if (fields.size() < 3 || fields[0] != "path_a" || fields[1] != "path_b" || fields[2] != "label" ||
          (fields.size() == 4 && fields[3] != "tag") || fields.size() > 4) {
        fail("expected header 'path_a,path_b,label[,tag]'");
      }
      has_tag = fields.size() == 4;
      have_header = true;
      continue;
    }
    const std::size_t expected = has_tag ? 4 : 3;
    if (fields.size() != expected && !(has_tag && fields.size() == 3)) {
      fail("expected " + std::to_string(expected) + " fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) fail("empty image path");

    PairRecord record;
    record.path_a = fs::path(fields[0]).is_absolute() ? fs::path(fields[0]) : base / fields[0];
    record.path_b = fs::path(fields[1]).is_absolute() ? fs::path(fields[1]) : base / fields[1];
    if (fields[2] == "genuine") {
      record.label = PairLabel::Genuine;
    } else if (fields[2] == "imposter") {
      record.label = PairLabel::Imposter;
    } else {
      fail("unknown label '" + fields[2] + "' (accepted: genuine, imposter)");
    }
    if (has_tag && fields.size() == 4 && !fields[3].empty()) record.tag = fields[3];
    records.push_back(std::move(record));
  }

  if (!have_header) fail("missing header");
  if (records.empty()) warn(warnings, path.string() + ": manifest contains no pairs");
  return records;
}

}  // namespace freqx
