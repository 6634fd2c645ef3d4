#include "commands.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "freqx/errors.hpp"
#include "freqx/imaging.hpp"
#include "freqx/parallel.hpp"
#include "freqx/selftest.hpp"
#include "freqx/serialize.hpp"
#include "svg_plot.hpp"

namespace freqx::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path with_suffix(const fs::path& path, const std::string& suffix, const std::string& extension) {
  return path.parent_path() / (path.stem().string() + suffix + extension);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, sep)) parts.push_back(part);
  return parts;
}

fs::path resolve_model(const fs::path& model) {
  if (model.is_absolute() || fs::exists(model)) return model;
  if (const char* dir = std::getenv(kModelDirEnv)) {
    const fs::path candidate = fs::path(dir) / model;
    if (fs::exists(candidate)) return candidate;
  }
  return model;
}

void check_band_size(const RunConfig& config, std::ostream& err) {
  static const std::set<double> studied{1, 2, 4, 8, 14};
  if (!(config.band_size > 0.0)) throw ParameterError("band size must be positive");
  if (!studied.count(config.band_size)) {
    err << "warning: band size " << config.band_size << " is outside the usual set {1, 2, 4, 8, 14}\n";
  }
}

// Side length every image must have, and how to load them.
LoadOptions load_options(const RunConfig& config, const fs::path& first_image) {
  LoadOptions options;
  options.resize_policy = config.resize_policy;
  if (!config.model_path.empty()) {
    const fs::path sidecar = config.sidecar_path.empty() ? default_sidecar_path(resolve_model(config.model_path))
                                                         : config.sidecar_path;
    options.expected_size = read_sidecar(sidecar).input_size;
  } else {
    options.expected_size = load_image(first_image, {}, nullptr).height();
  }
  return options;
}

SpatialImage maybe_degrade(const SpatialImage& img, const RunConfig& config) {
  return config.low_res ? degrade_resolution(img, *config.low_res) : img;
}

class ManifestPairs final : public PairSource {
 public:
  ManifestPairs(std::vector<PairRecord> records, LoadOptions options, const RunConfig& config)
      : records_(std::move(records)), options_(options), config_(config) {}

  std::size_t size() const override { return records_.size(); }
  PairLabel label(std::size_t index) const override { return records_.at(index).label; }

  std::pair<SpatialImage, SpatialImage> load(std::size_t index) const override {
    const auto& record = records_.at(index);
    Warnings warnings;
    SpatialImage a = load_image(record.path_a, options_, &warnings);
    SpatialImage b = load_image(record.path_b, options_, &warnings);
    if (config_.low_res) {
      if (!config_.cross_resolution) a = degrade_resolution(a, *config_.low_res);
      b = degrade_resolution(b, *config_.low_res);
    }
    return {std::move(a), std::move(b)};
  }

  const std::vector<PairRecord>& records() const { return records_; }

 private:
  std::vector<PairRecord> records_;
  LoadOptions options_;
  const RunConfig& config_;
};

ManifestPairs open_manifest(const RunConfig& config, std::ostream& err) {
  if (config.inputs.size() != 1) throw ParameterError("expected exactly one manifest path");
  Warnings warnings;
  auto records = read_manifest(config.inputs.front(), &warnings);
  for (const auto& w : warnings.messages) err << "warning: " << w << '\n';
  if (records.empty()) throw ParameterError("manifest contains no pairs");
  const LoadOptions options = load_options(config, records.front().path_a);
  // Surface decode warnings (alpha, grayscale) once per image.
  std::set<fs::path> seen;
  for (const auto& r : records) {
    for (const auto& path : {r.path_a, r.path_b}) {
      if (!seen.insert(path).second) continue;
      Warnings image_warnings;
      load_image(path, options, &image_warnings);
      for (const auto& w : image_warnings.messages) err << "warning: " << w << '\n';
    }
  }
  return ManifestPairs(std::move(records), options, config);
}

std::string mode_suffix(InfluenceMode mode) { return "_" + std::string(to_string(mode)); }

}  // namespace

std::unique_ptr<EmbeddingBackend> make_backend(const RunConfig& config, const BandPartition& partition) {
  const bool has_model = !config.model_path.empty();
  const bool has_builtin = !config.builtin_backend.empty();
  if (has_model == has_builtin) throw ParameterError("select exactly one backend: --model or --backend");

  if (has_model) {
    const fs::path model = resolve_model(config.model_path);
    const fs::path sidecar = config.sidecar_path.empty() ? default_sidecar_path(model) : config.sidecar_path;
    return external_model_embedder(model, read_sidecar(sidecar), config.resize_policy);
  }

  const auto parts = split(config.builtin_backend, ':');
  const std::string kind = parts.empty() ? "" : parts[0];
  try {
    if (kind == "toy") {
      if (parts.size() != 2) throw ParameterError("toy backend needs band indices, e.g. toy:0,1");
      std::set<std::size_t> bands;
      for (const auto& b : split(parts[1], ',')) bands.insert(std::stoul(b));
      return spectral_toy_embedder(std::move(bands), partition);
    }
    if (kind == "projection") {
      const std::uint64_t seed = parts.size() > 1 ? std::stoull(parts[1]) : 0;
      const int dim = parts.size() > 2 ? std::stoi(parts[2]) : 512;
      return seeded_projection_embedder(seed, dim);
    }
  } catch (const std::logic_error&) {
    throw ParameterError("malformed backend selector '" + config.builtin_backend + "'");
  }
  throw ParameterError("unknown backend '" + config.builtin_backend + "' (expected toy:<bands> or projection[:seed[:dim]])");
}

int cmd_explain(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.size() != 2) throw ParameterError("explain needs exactly two image paths");
  check_band_size(config, err);
  const LoadOptions options = load_options(config, config.inputs[0]);
  Warnings warnings;
  SpatialImage a = load_image(config.inputs[0], options, &warnings);
  SpatialImage b = load_image(config.inputs[1], options, &warnings);
  for (const auto& w : warnings.messages) err << "warning: " << w << '\n';
  if (config.low_res) {
    if (!config.cross_resolution) a = degrade_resolution(a, *config.low_res);
    b = degrade_resolution(b, *config.low_res);
  }

  const BandPartition partition = build_partition(a.size(), config.band_size, config.norm);
  const auto backend = make_backend(config, partition);
  const InfluenceProfile profile = pair_influence(a, b, *backend, partition, config.jobs);
  const std::string json = dump_json(profile_to_json(profile, backend->descriptor().model_id));
  if (config.output.empty()) {
    out << json;
  } else {
    write_text(config.output, json);
  }

  if (!config.svg.empty()) {
    const std::string title = config.inputs[0].filename().string() + " vs " + config.inputs[1].filename().string();
    if (config.mode == PlotMode::Both) {
      for (const auto mode : {InfluenceMode::Absolute, InfluenceMode::Directed}) {
        write_text(with_suffix(config.svg, mode_suffix(mode), ".svg"),
                   plot::fhp_svg(profile, mode, title + " (" + std::string(to_string(mode)) + ")"));
      }
    } else {
      const auto mode = config.mode == PlotMode::Absolute ? InfluenceMode::Absolute : InfluenceMode::Directed;
      write_text(config.svg, plot::fhp_svg(profile, mode, title));
    }
  }

  if (profile.degenerate) {
    err << "error: no band changed the similarity score; the profile is degenerate\n";
    return 2;
  }
  return 0;
}

int cmd_curves(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.output.empty()) throw ParameterError("curves needs --out <csv>");
  check_band_size(config, err);
  const ManifestPairs pairs = open_manifest(config, err);
  std::size_t genuine = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) genuine += pairs.label(i) == PairLabel::Genuine;
  if (genuine == 0 || genuine == pairs.size()) {
    throw MetricError("curves need at least one genuine and one imposter pair");
  }

  const int n = pairs.load(0).first.size();
  const BandPartition partition = build_partition(n, config.band_size, config.norm);
  const auto backend = make_backend(config, partition);

  CurveOptions options;
  options.direction = config.direction;
  options.metric = config.metric;
  options.target_fmr = config.target_fmr;
  options.jobs = config.jobs;

  const PairOrderings orderings = influence_orderings(pairs, *backend, partition, config.jobs);
  if (orderings.degenerate_count > 0) {
    err << "warning: " << orderings.degenerate_count << " pair(s) with degenerate profiles dropped from the influence curve\n";
  }

  std::vector<EvalCurve> curves;
  options.ordering = OrderingSource::Influence;
  curves.push_back(run_curve(pairs, *backend, partition, options, &orderings));
  options.ordering = OrderingSource::Random;
  for (std::size_t k = 0; k < config.baseline_seeds; ++k) {
    options.seed = config.master_seed + k;
    curves.push_back(run_curve(pairs, *backend, partition, options));
  }

  write_text(config.output, curves_to_csv(curves));

  RunManifest manifest;
  manifest.model_id = backend->descriptor().model_id;
  manifest.band_size = config.band_size;
  manifest.norm = config.norm;
  manifest.metric = config.metric;
  manifest.direction = config.direction;
  manifest.target_fmr = config.target_fmr;
  manifest.master_seed = config.master_seed;
  manifest.n_pairs = pairs.size();
  manifest.n_degenerate = orderings.degenerate_count;
  manifest.threshold = curves.front().threshold;
  manifest.low_res_factor = config.low_res;
  manifest.cross_resolution = config.cross_resolution;
  const fs::path manifest_path =
      config.run_manifest.empty() ? with_suffix(config.output, "", ".json") : config.run_manifest;
  write_text(manifest_path, dump_json(manifest_to_json(manifest)));

  if (!config.svg.empty()) {
    const std::string title = std::string(to_string(config.direction)) + " / " + std::string(to_string(config.metric)) +
                              " (s = " + format_sig9(config.band_size) + ", " + std::string(to_string(config.norm)) + ")";
    write_text(config.svg, plot::curves_svg(curves, title));
  }

  double baseline_auc = 0.0;
  for (std::size_t k = 1; k < curves.size(); ++k) baseline_auc += curve_auc(curves[k]);
  out << "influence AUC " << format_sig9(curve_auc(curves.front()));
  if (curves.size() > 1) out << ", mean baseline AUC " << format_sig9(baseline_auc / static_cast<double>(curves.size() - 1));
  out << '\n';
  return 0;
}

int cmd_aggregate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  check_band_size(config, err);
  const ManifestPairs pairs = open_manifest(config, err);
  const int n = pairs.load(0).first.size();
  const BandPartition partition = build_partition(n, config.band_size, config.norm);
  const auto backend = make_backend(config, partition);

  std::vector<std::optional<InfluenceProfile>> profiles(pairs.size());
  parallel_for(pairs.size(), backend->thread_safe() ? config.jobs : 1, [&](std::size_t i) {
    const auto [a, b] = pairs.load(i);
    try {
      InfluenceProfile profile = pair_influence(a, b, *backend, partition);
      if (!profile.degenerate) profiles[i] = std::move(profile);
    } catch (const DegenerateEmbeddingError&) {
    }
  });

  std::map<std::string, std::vector<InfluenceProfile>> groups;
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!profiles[i]) {
      ++degenerate;
      continue;
    }
    const auto& tag = pairs.records()[i].tag;
    const std::string group = config.group_by_tag ? tag.value_or("untagged") : "all";
    groups[group].push_back(std::move(*profiles[i]));
  }
  if (groups.empty()) throw MetricError("every pair produced a degenerate profile; nothing to aggregate");
  if (degenerate > 0) err << "warning: " << degenerate << " degenerate pair(s) excluded\n";

  std::vector<InfluenceMode> modes;
  if (config.mode != PlotMode::Directed) modes.push_back(InfluenceMode::Absolute);
  if (config.mode != PlotMode::Absolute) modes.push_back(InfluenceMode::Directed);

  nlohmann::ordered_json doc;
  doc["n_pairs"] = pairs.size();
  doc["n_degenerate"] = degenerate;
  doc["groups"] = nlohmann::ordered_json::array();
  for (const auto& [group, members] : groups) {
    for (const auto mode : modes) {
      const AggregateProfile aggregate = aggregate_profiles(members, mode);
      doc["groups"].push_back(aggregate_to_json(aggregate, partition, backend->descriptor().model_id, group));
      if (!config.svg.empty()) {
        std::string suffix;
        if (groups.size() > 1 || config.group_by_tag) suffix += "_" + group;
        if (modes.size() > 1) suffix += mode_suffix(mode);
        write_text(with_suffix(config.svg, suffix, ".svg"),
                   plot::aggregate_svg(aggregate, partition, group + " (" + std::string(to_string(mode)) + ")"));
      }
    }
  }
  const std::string json = dump_json(doc);
  if (config.output.empty()) {
    out << json;
  } else {
    write_text(config.output, json);
  }
  return 0;
}

int cmd_degrade(const RunConfig& config, std::ostream& out, std::ostream& err) {
  (void)err;
  if (config.inputs.size() != 1 || config.output.empty()) {
    throw ParameterError("degrade needs one input image and --out <image>");
  }
  const SpatialImage img = load_image(config.inputs.front());
  write_image(degrade_resolution(img, config.degrade_factor), config.output);
  out << "wrote " << config.output.string() << '\n';
  return 0;
}

int cmd_selftest(const RunConfig& config, std::ostream& out, std::ostream& err) {
  (void)err;
  const auto results = run_selftest({.inject_mask_asymmetry = config.inject_fault});
  bool ok = true;
  double total = 0.0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (" << format_sig9(round_sig9(r.seconds))
        << " s)\n";
    ok = ok && r.passed;
    total += r.seconds;
  }
  out << (ok ? "selftest passed" : "selftest FAILED") << " in " << format_sig9(round_sig9(total)) << " s\n";
  return ok ? 0 : 1;
}

}  // namespace freqx::cli
