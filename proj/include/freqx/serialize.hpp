#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

#include "freqx/evaluation.hpp"
#include "freqx/explain.hpp"

namespace freqx {

// Rounds to 9 significant digits; all emitted numbers go through this so
// outputs are byte-stable.
double round_sig9(double value);
std::string format_sig9(double value);

// {model_id, norm, band_size, bands: [{b, t}], reference_score, absolute,
//  directed, degenerate}
nlohmann::ordered_json profile_to_json(const InfluenceProfile& profile, const std::string& model_id);
InfluenceProfile profile_from_json(const nlohmann::json& doc);

nlohmann::ordered_json aggregate_to_json(const AggregateProfile& aggregate, const BandPartition& partition,
                                         const std::string& model_id, const std::string& group);

// Header `fraction,metric_value,ordering,seed`; the seed column is empty for
// influence-ordered curves.
std::string curves_to_csv(std::span<const EvalCurve> curves);

struct RunManifest {
  std::string model_id;
  double band_size = 0.0;
  Norm norm = Norm::L2;
  CurveMetric metric = CurveMetric::Eer;
  CurveDirection direction = CurveDirection::Deletion;
  double target_fmr = 0.1;
  std::uint64_t master_seed = 0;
  std::size_t n_pairs = 0;
  std::size_t n_degenerate = 0;
  std::optional<double> threshold;
  std::optional<double> low_res_factor;
  bool cross_resolution = false;
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);

// Pretty JSON with a trailing newline.
std::string dump_json(const nlohmann::ordered_json& doc);

}  // namespace freqx
