#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "freqx/serialize.hpp"

namespace freqx::plot {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 60;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (const char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void open_svg(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
      << "</text>\n";
}

// Maps a data value in [lo, hi] to a y pixel inside the plot area.
struct YAxis {
  double lo, hi;
  double operator()(double v) const { return kTop + (hi - v) / (hi - lo) * (kHeight - kTop - kBottom); }
};

void draw_y_axis(std::ostringstream& out, const YAxis& y, const std::string& label) {
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y(v) + 4) << "\" text-anchor=\"end\">"
        << format_sig9(round_sig9(std::round(v * 1000) / 1000)) << "</text>\n";
  }
  out << "<text x=\"15\" y=\"" << num(kHeight / 2) << "\" transform=\"rotate(-90 15 " << num(kHeight / 2)
      << ")\" text-anchor=\"middle\">" << escape(label) << "</text>\n";
}

std::string band_label(const BandSpec& band) { return format_sig9(round_sig9(band.upper)); }

}  // namespace

std::string fhp_svg(const InfluenceProfile& profile, InfluenceMode mode, const std::string& title) {
  const auto& values = profile.values(mode);
  const auto& bands = profile.partition.bands();
  double hi = 0.0;
  double lo = 0.0;
  for (const double v : values) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  if (mode == InfluenceMode::Absolute || lo == 0.0) lo = 0.0;
  if (hi == 0.0 && lo == 0.0) hi = 1.0;
  const YAxis y{lo, hi};

  std::ostringstream out;
  open_svg(out, title);
  draw_y_axis(out, y, mode == InfluenceMode::Absolute ? "absolute influence" : "directed influence");
  const double plot_width = kWidth - kLeft - kRight;
  const double slot = plot_width / static_cast<double>(values.size());
  const double zero = y(0.0);
  out << "<line class=\"zero-axis\" x1=\"" << kLeft << "\" y1=\"" << num(zero) << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << num(zero) << "\" stroke=\"black\"/>\n";
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double x = kLeft + slot * j + slot * 0.1;
    const double top = y(std::max(values[j], 0.0));
    const double bottom = y(std::min(values[j], 0.0));
    const char* fill = values[j] < 0.0 ? "#c0392b" : "#2e86c1";
    out << "<rect class=\"bar\" x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(slot * 0.8)
        << "\" height=\"" << num(bottom - top) << "\" fill=\"" << fill << "\"><title>band (" << format_sig9(bands[j].lower)
        << ", " << format_sig9(bands[j].upper) << "]: " << format_sig9(values[j]) << "</title></rect>\n";
    out << "<text x=\"" << num(x + slot * 0.4) << "\" y=\"" << num(kHeight - kBottom + 15)
        << "\" text-anchor=\"middle\">" << band_label(bands[j]) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + plot_width / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">frequency band (upper bound t)</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string aggregate_svg(const AggregateProfile& aggregate, const BandPartition& partition,
                          const std::string& title) {
  double hi = 0.0;
  double lo = 0.0;
  for (std::size_t j = 0; j < aggregate.mean.size(); ++j) {
    hi = std::max(hi, aggregate.mean[j] + aggregate.std[j]);
    lo = std::min(lo, aggregate.mean[j] - aggregate.std[j]);
  }
  if (aggregate.mode == InfluenceMode::Absolute) lo = std::min(0.0, lo);
  if (hi == lo) hi = lo + 1.0;
  const YAxis y{lo, hi};

  std::ostringstream out;
  open_svg(out, title);
  draw_y_axis(out, y, std::string("mean ") + std::string(to_string(aggregate.mode)) + " influence");
  const double plot_width = kWidth - kLeft - kRight;
  const double slot = plot_width / static_cast<double>(aggregate.mean.size());
  for (std::size_t j = 0; j < aggregate.mean.size(); ++j) {
    const double m = aggregate.mean[j];
    const double x = kLeft + slot * j + slot * 0.1;
    const double top = y(std::max(m, 0.0));
    const double bottom = y(std::min(m, 0.0));
    const double cx = x + slot * 0.4;
    out << "<rect class=\"bar\" x=\"" << num(x) << "\" y=\"" << num(top) << "\" width=\"" << num(slot * 0.8)
        << "\" height=\"" << num(bottom - top) << "\" fill=\"#2e86c1\"/>\n";
    out << "<line class=\"error-bar\" x1=\"" << num(cx) << "\" y1=\"" << num(y(m - aggregate.std[j])) << "\" x2=\""
        << num(cx) << "\" y2=\"" << num(y(m + aggregate.std[j])) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(cx) << "\" y=\"" << num(kHeight - kBottom + 15) << "\" text-anchor=\"middle\">"
        << band_label(partition.band(j)) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + plot_width / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">frequency band (upper bound t), n = " << aggregate.count << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string curves_svg(std::span<const EvalCurve> curves, const std::string& title) {
  double hi = 0.0;
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) hi = std::max(hi, p.value);
  }
  hi = hi > 0.0 ? std::min(1.0, std::ceil(hi * 10.0) / 10.0) : 1.0;
  const YAxis y{0.0, hi};
  const double plot_width = kWidth - kLeft - kRight;
  auto x_of = [&](double f) { return kLeft + f * plot_width; };

  const bool deletion = curves.empty() || curves.front().direction == CurveDirection::Deletion;

  std::ostringstream out;
  open_svg(out, title);
  const std::string metric = curves.empty() ? "metric" : std::string(to_string(curves.front().metric));
  draw_y_axis(out, y, metric);
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    out << "<text x=\"" << num(x_of(i / 4.0)) << "\" y=\"" << num(kHeight - kBottom + 15)
        << "\" text-anchor=\"middle\">" << format_sig9(i / 4.0) << "</text>\n";
  }
  for (const auto& curve : curves) {
    const bool baseline = curve.ordering == OrderingSource::Random;
    out << "<polyline class=\"" << (baseline ? "baseline" : "influence") << "\" fill=\"none\" stroke=\""
        << (baseline ? "#7f8c8d" : "#2e86c1") << "\" stroke-width=\"" << (baseline ? "1" : "2") << '"';
    if (baseline) out << " stroke-dasharray=\"2,3\"";
    out << " points=\"";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
      if (i) out << ' ';
      out << num(x_of(curve.points[i].fraction)) << ',' << num(y(curve.points[i].value));
    }
    out << "\"/>\n";
  }
  out << "<text x=\"" << num(kLeft + plot_width / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\">fraction of bands " << (deletion ? "removed" : "inserted") << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace freqx::plot
