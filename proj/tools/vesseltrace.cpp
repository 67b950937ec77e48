// vesseltrace: retinal vessel segmentation from the command line.
//
//   vesseltrace segment IMAGE --out MASK [--mask FOV] [--config CFG] [--dump-intermediates DIR]
//   vesseltrace evaluate --dataset ROOT --split test --csv OUT [--auc] [--config CFG] [--jobs N]
//   vesseltrace sweep --dataset ROOT --split train --grid GRID --csv OUT [--config CFG] [--jobs N]
//
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal error.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "vesseltrace/config.hpp"
#include "vesseltrace/dataset.hpp"
#include "vesseltrace/image_io.hpp"
#include "vesseltrace/pipeline.hpp"
#include "vesseltrace/simd.hpp"

namespace {

using namespace vesseltrace;
namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

PipelineConfig load_config(const std::string& path) {
  if (path.empty()) return PipelineConfig{};
  try {
    return parse_config(path);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::UnknownKey:
    case ErrorKind::TypeMismatch:
    case ErrorKind::OutOfRange:
    case ErrorKind::OversizedGrid:
    case ErrorKind::InvalidArgument:
      return kUsage;
    default:
      return kData;
  }
}

int run_segment(const std::string& image, const std::string& mask, const std::string& config, const std::string& out,
                const std::string& dump_dir) {
  const PipelineConfig cfg = load_config(config);
  const RGBImage img = load_rgb(image);
  const BinaryMask fov = mask.empty() ? derive_fov_mask(img, cfg.preprocess.fov_threshold) : load_mask(mask);
  const Segmentation seg = segment(img, fov, cfg);
  if (!dump_dir.empty()) dump_intermediates(seg, dump_dir, fs::path(image).stem().string());
  save_mask(seg.binary, out);
  return kOk;
}

int run_evaluate(const std::string& root, const std::string& split, const std::string& config, const std::string& csv,
                 bool with_auc, int jobs) {
  const PipelineConfig cfg = load_config(config);
  const DatasetIndex index = index_drive(root, parse_split(split));
  const DatasetEvaluation eval = evaluate_dataset(index, cfg, with_auc, jobs);
  std::ostringstream text;
  write_evaluation_csv(text, eval);
  write_text_atomic(csv, text.str());
  const auto& a = eval.aggregate;
  const auto show = [](const std::optional<double>& v) { return v ? format_metric(v) : std::string("n/a"); };
  std::cout << "mean  sen=" << show(a.sen.mean) << " spe=" << show(a.spe.mean) << " acc=" << show(a.acc.mean)
            << " (std " << show(a.acc.std) << ") auc=" << show(a.auc.mean) << " kappa=" << show(a.kappa.mean)
            << " mcc=" << show(a.mcc.mean) << "\n";
  return kOk;
}

int run_sweep_cmd(const std::string& root, const std::string& split, const std::string& config, const std::string& grid_path,
                  const std::string& csv, std::size_t cap, int jobs) {
  const PipelineConfig base = load_config(config);
  SweepGrid grid;
  try {
    grid = parse_grid(grid_path);
  } catch (const std::exception& e) {
    throw ConfigError(grid_path + ": " + e.what());
  }
  const DatasetIndex index = index_drive(root, parse_split(split));
  const auto rows = run_sweep(index, base, grid, SweepOptions{cap, true, jobs});
  std::ostringstream text;
  write_sweep_csv(text, grid, rows);
  write_text_atomic(csv, text.str());
  if (!rows.empty()) {
    std::cout << "best mcc=" << format_metric(rows.front().aggregate.mcc.mean);
    for (const auto& [k, v] : rows.front().settings) std::cout << "  " << k << "=" << v;
    std::cout << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Retinal vessel segmentation: top-hat preprocessing, B-COSFIRE filtering, Otsu binarization"};
  app.require_subcommand(1);
  bool print_isa = false;
  app.add_flag("--print-isa", print_isa, "Print the selected SIMD kernel set to stderr");

  std::string config;
  int jobs = 1;

  auto* seg = app.add_subcommand("segment", "Segment one fundus image");
  std::string image, mask, out, dump_dir;
  seg->add_option("image", image, "Color fundus image (PNG or PPM)")->required();
  seg->add_option("--mask", mask, "FOV mask; derived from luminance when omitted");
  seg->add_option("--out", out, "Output vessel mask (.png or .pgm)")->required();
  seg->add_option("--config", config, "Configuration file");
  seg->add_option("--jobs", jobs, "Worker threads (unused for a single image)")->check(CLI::PositiveNumber);
  seg->add_option("--dump-intermediates", dump_dir, "Directory for stage images");

  auto* ev = app.add_subcommand("evaluate", "Segment and score a DRIVE split");
  std::string root, split = "test", csv;
  bool with_auc = false;
  ev->add_option("--dataset", root, "Root of the PNG-converted DRIVE tree")->required();
  ev->add_option("--split", split, "train or test");
  ev->add_option("--csv", csv, "Per-image metrics CSV")->required();
  ev->add_option("--config", config, "Configuration file");
  ev->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  ev->add_flag("--auc", with_auc, "Also compute ROC AUC from the soft response");

  auto* sw = app.add_subcommand("sweep", "Grid search over configuration keys");
  std::string grid;
  std::size_t cap = 4096;
  sw->add_option("--dataset", root, "Root of the PNG-converted DRIVE tree")->required();
  sw->add_option("--split", split, "train or test");
  sw->add_option("--grid", grid, "Grid file: key = v1, v2, ...")->required();
  sw->add_option("--csv", csv, "Output CSV, best MCC first")->required();
  sw->add_option("--config", config, "Base configuration file");
  sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--max-combinations", cap, "Reject grids larger than this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (print_isa) std::cerr << "simd: " << simd::to_string(simd::active_isa()) << "\n";

  try {
    if (*seg) return run_segment(image, mask, config, out, dump_dir);
    if (*ev) return run_evaluate(root, split, config, csv, with_auc, jobs);
    if (*sw) return run_sweep_cmd(root, split, config, grid, csv, cap, jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
