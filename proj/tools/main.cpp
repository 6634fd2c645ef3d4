#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"
#include "freqx/errors.hpp"
#include "freqx/parallel.hpp"

using namespace freqx;

namespace {

void add_backend_options(CLI::App* cmd, cli::RunConfig& config, std::string& resize) {
  cmd->add_option("--model", config.model_path, "ONNX face-embedding model (sidecar <model>.json)");
  cmd->add_option("--sidecar", config.sidecar_path, "Preprocessing sidecar for --model");
  cmd->add_option("--backend", config.builtin_backend, "Builtin backend: toy:<bands> or projection[:seed[:dim]]");
  cmd->add_option("--resize", resize, "Size mismatch policy: error or bilinear")
      ->check(CLI::IsMember({"error", "bilinear"}));
}

void add_band_options(CLI::App* cmd, cli::RunConfig& config, std::string& norm) {
  cmd->add_option("-s,--band-size", config.band_size, "Frequency band size s");
  cmd->add_option("--norm", norm, "Radius norm: L1 or L2")->check(CLI::IsMember({"L1", "L2", "l1", "l2"}));
  cmd->add_option("-j,--jobs", config.jobs, "Parallel jobs (default: hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain explanations for face verification"};
  app.require_subcommand(1);

  cli::RunConfig config;
  config.jobs = default_jobs();
  std::string resize = "error";
  std::string norm = "L2";
  std::string mode = "both";
  std::string metric = "eer";
  std::string direction = "deletion";

  const std::map<std::string, cli::PlotMode> modes{
      {"absolute", cli::PlotMode::Absolute}, {"directed", cli::PlotMode::Directed}, {"both", cli::PlotMode::Both}};

  auto* explain = app.add_subcommand("explain", "Frequency heat plot for one image pair");
  explain->add_option("images", config.inputs, "Two aligned face images")->required()->expected(2);
  add_backend_options(explain, config, resize);
  add_band_options(explain, config, norm);
  explain->add_option("--mode", mode, "absolute, directed or both")->check(CLI::IsMember({"absolute", "directed", "both"}));
  explain->add_option("-o,--out", config.output, "FHP JSON output (default: stdout)");
  explain->add_option("--svg", config.svg, "SVG bar plot; --mode both writes <stem>_absolute/_directed.svg");
  explain->add_option("--low-res", config.low_res, "Degrade by bilinear down/up-scaling with factor m");
  explain->add_flag("--cross-resolution", config.cross_resolution, "Degrade only the second image");

  auto* curves = app.add_subcommand("curves", "Insertion/deletion curves over a pair manifest");
  curves->add_option("manifest", config.inputs, "CSV manifest path_a,path_b,label[,tag]")->required()->expected(1);
  add_backend_options(curves, config, resize);
  add_band_options(curves, config, norm);
  curves->add_option("--metric", metric, "eer or fnmr")->check(CLI::IsMember({"eer", "fnmr"}));
  curves->add_option("--direction", direction, "deletion or insertion")->check(CLI::IsMember({"deletion", "insertion"}));
  curves->add_option("--target-fmr", config.target_fmr, "FMR for the frozen FNMR threshold");
  curves->add_option("--seed", config.master_seed, "Master seed for random baselines");
  curves->add_option("--baseline-seeds", config.baseline_seeds, "Number of random-order baseline curves");
  curves->add_option("-o,--out", config.output, "Curves CSV")->required();
  curves->add_option("--run-manifest", config.run_manifest, "Run manifest JSON (default: <out>.json)");
  curves->add_option("--svg", config.svg, "SVG line plot");
  curves->add_option("--low-res", config.low_res, "Degrade by bilinear down/up-scaling with factor m");
  curves->add_flag("--cross-resolution", config.cross_resolution, "Degrade only the second image");

  auto* aggregate = app.add_subcommand("aggregate", "Mean and standard deviation of FHPs over a manifest");
  aggregate->add_option("manifest", config.inputs, "CSV manifest path_a,path_b,label[,tag]")->required()->expected(1);
  add_backend_options(aggregate, config, resize);
  add_band_options(aggregate, config, norm);
  aggregate->add_option("--mode", mode, "absolute, directed or both")->check(CLI::IsMember({"absolute", "directed", "both"}));
  aggregate->add_flag("--group-by-tag", config.group_by_tag, "One aggregate per manifest tag");
  aggregate->add_option("-o,--out", config.output, "Aggregate JSON output (default: stdout)");
  aggregate->add_option("--svg", config.svg, "SVG plot with error bars");
  aggregate->add_option("--low-res", config.low_res, "Degrade by bilinear down/up-scaling with factor m");
  aggregate->add_flag("--cross-resolution", config.cross_resolution, "Degrade only the second image");

  auto* degrade = app.add_subcommand("degrade", "Bilinear down/up-scaling of one image");
  degrade->add_option("image", config.inputs, "Input image")->required()->expected(1);
  degrade->add_option("-o,--out", config.output, "Output PNG")->required();
  degrade->add_option("-m,--factor", config.degrade_factor, "Downscaling factor m in (0, 1)");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in correctness checks");
  selftest->add_flag("--inject-fault", config.inject_fault, "Corrupt one mask to verify failure detection");

  CLI11_PARSE(app, argc, argv);

  try {
    config.resize_policy = resize == "bilinear" ? ResizePolicy::Bilinear : ResizePolicy::Error;
    config.norm = parse_norm(norm);
    config.mode = modes.at(mode);
    config.metric = parse_curve_metric(metric);
    config.direction = parse_curve_direction(direction);
    if (config.jobs == 0) config.jobs = default_jobs();

    if (*explain) return cli::cmd_explain(config, std::cout, std::cerr);
    if (*curves) return cli::cmd_curves(config, std::cout, std::cerr);
    if (*aggregate) return cli::cmd_aggregate(config, std::cout, std::cerr);
    if (*degrade) return cli::cmd_degrade(config, std::cout, std::cerr);
    if (*selftest) return cli::cmd_selftest(config, std::cout, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
