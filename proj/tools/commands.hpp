#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "freqx/embedder.hpp"
#include "freqx/evaluation.hpp"
#include "freqx/explain.hpp"

namespace freqx::cli {

// Environment variable consulted for relative --model paths.
inline constexpr const char* kModelDirEnv = "FREQX_MODEL_DIR";

enum class PlotMode { Absolute, Directed, Both };

struct RunConfig {
  // Backend: exactly one of model_path or builtin_backend.
  std::filesystem::path model_path;
  std::filesystem::path sidecar_path;  // defaults to <model>.json
  std::string builtin_backend;         // "toy:0,1" or "projection[:seed[:dim]]"
  ResizePolicy resize_policy = ResizePolicy::Error;

  double band_size = 8.0;
  Norm norm = Norm::L2;
  PlotMode mode = PlotMode::Both;
  CurveMetric metric = CurveMetric::Eer;
  CurveDirection direction = CurveDirection::Deletion;
  double target_fmr = 0.1;
  std::uint64_t master_seed = 0;
  std::size_t baseline_seeds = 10;
  std::size_t jobs = 1;

  std::optional<double> low_res;  // degradation factor m
  bool cross_resolution = false;  // degrade only the second image of each pair
  bool group_by_tag = false;

  std::vector<std::filesystem::path> inputs;  // images or a manifest
  std::filesystem::path output;
  std::filesystem::path svg;
  std::filesystem::path run_manifest;  // curves: defaults to <output>.json

  double degrade_factor = 0.25;
  bool inject_fault = false;
};

// Each returns the process exit code; errors throw freqx::Error.
int cmd_explain(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_curves(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_aggregate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_degrade(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err);

// Builds the selected backend; the toy backend reads `partition`.
std::unique_ptr<EmbeddingBackend> make_backend(const RunConfig& config, const BandPartition& partition);

}  // namespace freqx::cli
