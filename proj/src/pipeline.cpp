#include "vesseltrace/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vesseltrace/bcosfire.hpp"
#include "vesseltrace/image_io.hpp"
#include "vesseltrace/postprocess.hpp"

namespace vesseltrace {

Segmentation segment(const RGBImage& img, const BinaryMask& fov, const PipelineConfig& cfg) {
  cfg.validate();
  require_same_shape(img, fov, "segment: image and FOV differ in size");
  Segmentation seg;
  seg.pre = preprocess_pipeline(img, fov, cfg.preprocess);
  seg.response = respond(seg.pre.image, cfg.filter);
  seg.binary = postprocess_pipeline(seg.response, fov, cfg.post);
  return seg;
}

void dump_intermediates(const Segmentation& seg, const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Unwritable, dir.string());
  const auto& s = seg.pre.stages;
  save_gray(s.green, dir / (stem + "_green.png"));
  save_gray(s.inverted, dir / (stem + "_inverted.png"));
  save_gray(s.padded, dir / (stem + "_padded.png"));
  save_gray(s.tophat, dir / (stem + "_tophat.png"));
  save_gray(s.clahe, dir / (stem + "_clahe.png"));
  save_gray(seg.response, dir / (stem + "_response.png"));
  save_mask(seg.binary, dir / (stem + "_binary.png"));
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

DatasetEvaluation evaluate_dataset(const DatasetIndex& index, const PipelineConfig& cfg, bool with_auc, int jobs) {
  cfg.validate();
  DatasetEvaluation out;
  out.cases.resize(index.cases.size());
  parallel_for(index.cases.size(), jobs, [&](std::size_t i) {
    const DatasetCase& c = index.cases[i];
    try {
      const RGBImage img = load_rgb(c.image);
      const BinaryMask fov = load_mask(c.mask);
      const BinaryMask gt = load_mask(index.ground_truth(c, cfg.eval.gt_observer));
      require_same_shape(img, gt, "ground truth size differs from image");
      const Segmentation seg = segment(img, fov, cfg);
      MetricsReport r = metrics(confusion(seg.binary, gt, fov));
      if (with_auc) r.auc = roc_auc(seg.response, gt, fov, cfg.eval.auc_thresholds).auc;
      out.cases[i] = {c.id, r};
    } catch (const Error& e) {
      throw CaseError(e.kind(), c.id, e.what());
    }
  });
  std::vector<MetricsReport> reports;
  for (const auto& c : out.cases) reports.push_back(c.report);
  out.aggregate = aggregate(reports);
  return out;
}

void write_evaluation_csv(std::ostream& os, const DatasetEvaluation& eval) {
  std::vector<std::string> ids;
  for (const auto& c : eval.cases) ids.push_back(c.id);
  write_metrics_csv(os, ids, eval.aggregate);
}

std::vector<SweepRow> run_sweep(const DatasetIndex& index, const PipelineConfig& base, const SweepGrid& grid,
                                const SweepOptions& options) {
  const std::size_t n = grid_size(grid);
  if (n > options.max_combinations) {
    throw Error(ErrorKind::OversizedGrid, std::to_string(n) + " combinations exceed the cap of " +
                                              std::to_string(options.max_combinations));
  }
  // Build and validate every configuration before any image is processed.
  std::vector<SweepRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].combination = i;
    rows[i].settings = grid_combination(grid, i);
    rows[i].config = base;
    for (const auto& [key, value] : rows[i].settings) set_config_value(rows[i].config, key, value);
    try {
      rows[i].config.validate();
    } catch (const Error& e) {
      throw Error(e.kind(), "grid combination " + std::to_string(i) + ": " + e.what());
    }
  }
  for (auto& row : rows) {
    row.aggregate = evaluate_dataset(index, row.config, options.with_auc, options.jobs).aggregate;
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const auto& ma = a.aggregate.mcc.mean;
    const auto& mb = b.aggregate.mcc.mean;
    if (ma.has_value() != mb.has_value()) return ma.has_value();
    return ma && *ma > *mb;
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows) {
  auto quote = [](const std::string& v) { return v.find(',') == std::string::npos ? v : "\"" + v + "\""; };
  for (const auto& axis : grid) os << axis.key << ',';
  os << "mean_sen,mean_spe,mean_acc,mean_auc,mean_kappa,mean_mcc,std_acc\n";
  for (const auto& row : rows) {
    for (const auto& [key, value] : row.settings) os << quote(value) << ',';
    const auto& a = row.aggregate;
    os << format_metric(a.sen.mean) << ',' << format_metric(a.spe.mean) << ',' << format_metric(a.acc.mean) << ','
       << format_metric(a.auc.mean) << ',' << format_metric(a.kappa.mean) << ',' << format_metric(a.mcc.mean) << ','
       << format_metric(a.acc.std) << '\n';
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Unwritable, path.string());
    out << text;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::Unwritable, path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::Unwritable, path.string());
  }
}

}  // namespace vesseltrace
