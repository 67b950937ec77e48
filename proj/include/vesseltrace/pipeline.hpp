#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vesseltrace/config.hpp"
#include "vesseltrace/dataset.hpp"
#include "vesseltrace/evaluation.hpp"
#include "vesseltrace/preprocess.hpp"

namespace vesseltrace {

struct Segmentation {
  PreprocessResult pre;
  GrayImage response;  ///< orientation-pooled filter response in [0, 1]
  BinaryMask binary;   ///< final vessel map, a subset of the input FOV
};

/// Full chain for one image. Postprocessing and the result are restricted to
/// `fov` (the original, un-padded mask).
Segmentation segment(const RGBImage& img, const BinaryMask& fov, const PipelineConfig& cfg);

/// Writes `<stem>_green.png` ... `<stem>_clahe.png`, `<stem>_response.png`
/// and `<stem>_binary.png` into dir (created if needed).
void dump_intermediates(const Segmentation& seg, const std::filesystem::path& dir, const std::string& stem);

/// Runs fn(0) .. fn(n - 1) on up to `jobs` threads. If any call throws, the
/// exception of the lowest failing index is rethrown after all work stops.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct CaseMetrics {
  std::string id;
  MetricsReport report;
};

struct DatasetEvaluation {
  std::vector<CaseMetrics> cases;  ///< in index order
  AggregateReport aggregate;
};

/// Thrown with the id of the first failing case.
class CaseError : public Error {
 public:
  CaseError(ErrorKind kind, std::string id, const std::string& what)
      : Error(kind, "case " + id + ": " + what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

/// Segments every case, scores it against the configured observer inside the
/// case's FOV mask and aggregates. Results do not depend on `jobs`.
DatasetEvaluation evaluate_dataset(const DatasetIndex& index, const PipelineConfig& cfg, bool with_auc, int jobs);

void write_evaluation_csv(std::ostream& os, const DatasetEvaluation& eval);

struct SweepRow {
  std::size_t combination = 0;
  std::vector<std::pair<std::string, std::string>> settings;
  PipelineConfig config;
  AggregateReport aggregate;
};

struct SweepOptions {
  std::size_t max_combinations = 4096;
  bool with_auc = true;
  int jobs = 1;
};

/// Evaluates every grid combination over `base`; rows sorted by mean MCC,
/// highest first (absent MCC last, ties by combination order).
std::vector<SweepRow> run_sweep(const DatasetIndex& index, const PipelineConfig& base, const SweepGrid& grid,
                                const SweepOptions& options);

/// Grid keys, then mean_sen .. mean_mcc and std_acc.
void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows);

/// Writes through a sibling temporary and renames on success.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace vesseltrace
