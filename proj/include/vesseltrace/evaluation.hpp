#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

struct Confusion {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// Absent values mark a zero denominator; they are never coerced to 0.
struct MetricsReport {
  std::optional<double> sen;
  std::optional<double> spe;
  std::optional<double> acc;
  std::optional<double> auc;
  std::optional<double> kappa;
  std::optional<double> mcc;
};

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> std;  ///< sample standard deviation (n - 1)
  std::size_t count = 0;      ///< reports that carried a value
  std::size_t excluded = 0;   ///< reports where the value was absent
};

struct AggregateReport {
  std::vector<MetricsReport> reports;
  MetricSummary sen, spe, acc, auc, kappa, mcc;
};

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::optional<double> auc;
  std::vector<RocPoint> points;  ///< sorted by (fpr, tpr), includes (0,0) and (1,1)
};

/// Counts over pixels where fov is true.
Confusion confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& fov);

/// Sen, Spe, Acc, kappa and MCC; auc is left absent.
MetricsReport metrics(const Confusion& c);

/// Threshold sweep theta_j = j / n_thresholds, j = 0..n_thresholds, with a
/// strict `>` test; trapezoidal area under the sorted (FPR, TPR) points.
RocCurve roc_auc(const GrayImage& response, const BinaryMask& gt, const BinaryMask& fov, int n_thresholds = 256);

AggregateReport aggregate(const std::vector<MetricsReport>& reports);

/// `image,sen,spe,acc,auc,kappa,mcc`; one row per id plus `mean` and `std`
/// rows. Absent values are empty fields.
void write_metrics_csv(std::ostream& os, const std::vector<std::string>& ids, const AggregateReport& agg);

/// Fixed six-decimal rendering used by every CSV the tool writes.
std::string format_metric(const std::optional<double>& v);

}  // namespace vesseltrace
