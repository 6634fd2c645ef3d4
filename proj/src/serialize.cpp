#include "freqx/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "freqx/errors.hpp"

namespace freqx {

std::string format_sig9(double value) {
  if (value == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double round_sig9(double value) { return std::strtod(format_sig9(value).c_str(), nullptr); }

namespace {

nlohmann::ordered_json rounded(const std::vector<double>& values) {
  auto array = nlohmann::ordered_json::array();
  for (const double v : values) array.push_back(round_sig9(v));
  return array;
}

nlohmann::ordered_json bands_json(const BandPartition& partition) {
  auto bands = nlohmann::ordered_json::array();
  for (const auto& band : partition.bands()) {
    bands.push_back({{"b", round_sig9(band.lower)}, {"t", round_sig9(band.upper)}});
  }
  return bands;
}

// Rounds a distribution summing to 1 and folds the accumulated rounding error
// into the largest entry, so the emitted values still sum to 1 within one
// rounding step (5e-10) instead of one step per band.
std::vector<double> round_distribution(const std::vector<double>& values) {
  std::vector<double> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(), round_sig9);
  if (out.empty()) return out;
  std::size_t largest = 0;
  double others = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (std::abs(out[j]) > std::abs(out[largest])) largest = j;
  }
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (j != largest) others += std::abs(out[j]);
  }
  if (out[largest] == 0.0) return out;
  out[largest] = std::copysign(round_sig9(1.0 - others), out[largest]);
  return out;
}

}  // namespace

nlohmann::ordered_json profile_to_json(const InfluenceProfile& profile, const std::string& model_id) {
  nlohmann::ordered_json doc;
  doc["model_id"] = model_id;
  doc["norm"] = to_string(profile.partition.norm());
  doc["band_size"] = round_sig9(profile.partition.band_size());
  doc["bands"] = bands_json(profile.partition);
  doc["reference_score"] = round_sig9(profile.reference_score);
  if (profile.degenerate) {
    doc["absolute"] = rounded(profile.absolute);
    doc["directed"] = rounded(profile.directed);
  } else {
    const std::vector<double> absolute = round_distribution(profile.absolute);
    std::vector<double> directed(absolute.size());
    for (std::size_t j = 0; j < absolute.size(); ++j) {
      directed[j] = std::copysign(absolute[j], profile.directed[j]);
      if (absolute[j] == 0.0) directed[j] = 0.0;
    }
    doc["absolute"] = absolute;
    doc["directed"] = directed;
  }
  doc["degenerate"] = profile.degenerate;
  return doc;
}

InfluenceProfile profile_from_json(const nlohmann::json& doc) {
  try {
    InfluenceProfile profile;
    const auto& bands = doc.at("bands");
    const double band_size = doc.at("band_size").get<double>();
    const Norm norm = parse_norm(doc.at("norm").get<std::string>());
    const double half = bands.back().at("t").get<double>();
    profile.partition = build_partition(static_cast<int>(std::lround(2 * half)), band_size, norm);
    if (profile.partition.band_count() != bands.size()) throw IoError("FHP JSON: band list does not match band_size");
    profile.reference_score = doc.at("reference_score").get<double>();
    profile.absolute = doc.at("absolute").get<std::vector<double>>();
    profile.directed = doc.at("directed").get<std::vector<double>>();
    profile.degenerate = doc.at("degenerate").get<bool>();
    if (profile.absolute.size() != bands.size() || profile.directed.size() != bands.size()) {
      throw IoError("FHP JSON: influence arrays do not match the band count");
    }
    // Raw deltas are not serialized; directed values carry the same signs.
    profile.raw_deltas = profile.directed;
    return profile;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid FHP JSON: ") + e.what());
  }
}

nlohmann::ordered_json aggregate_to_json(const AggregateProfile& aggregate, const BandPartition& partition,
                                         const std::string& model_id, const std::string& group) {
  nlohmann::ordered_json doc;
  doc["group"] = group;
  doc["model_id"] = model_id;
  doc["norm"] = to_string(partition.norm());
  doc["band_size"] = round_sig9(partition.band_size());
  doc["bands"] = bands_json(partition);
  doc["mode"] = to_string(aggregate.mode);
  doc["count"] = aggregate.count;
  doc["mean"] = rounded(aggregate.mean);
  doc["std"] = rounded(aggregate.std);
  return doc;
}

std::string curves_to_csv(std::span<const EvalCurve> curves) {
  std::ostringstream out;
  out << "fraction,metric_value,ordering,seed\n";
  for (const auto& curve : curves) {
    for (const auto& p : curve.points) {
      out << format_sig9(p.fraction) << ',' << format_sig9(p.value) << ',' << to_string(curve.ordering) << ',';
      if (curve.seed) out << *curve.seed;
      out << '\n';
    }
  }
  return out.str();
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["model_id"] = m.model_id;
  doc["s"] = round_sig9(m.band_size);
  doc["norm"] = to_string(m.norm);
  doc["metric"] = to_string(m.metric);
  doc["direction"] = to_string(m.direction);
  doc["target_fmr"] = round_sig9(m.target_fmr);
  doc["master_seed"] = m.master_seed;
  doc["n_pairs"] = m.n_pairs;
  doc["n_degenerate"] = m.n_degenerate;
  if (m.threshold) doc["threshold"] = *m.threshold;
  if (m.low_res_factor) {
    doc["low_res_factor"] = round_sig9(*m.low_res_factor);
    doc["cross_resolution"] = m.cross_resolution;
    doc["interpolation"] = "bilinear, half-pixel centers, edge clamp";
  }
  return doc;
}

std::string dump_json(const nlohmann::ordered_json& doc) { return doc.dump(2) + "\n"; }

}  // namespace freqx
