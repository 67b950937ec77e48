#include "vesseltrace/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace vesseltrace {
namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

MetricSummary summarize(const std::vector<MetricsReport>& reports, std::optional<double> MetricsReport::*field) {
  MetricSummary s;
  double sum = 0.0;
  for (const auto& r : reports) {
    if (const auto& v = r.*field) {
      sum += *v;
      ++s.count;
    } else {
      ++s.excluded;
    }
  }
  if (s.count == 0) return s;
  const double mean = sum / static_cast<double>(s.count);
  s.mean = mean;
  if (s.count > 1) {
    double sq = 0.0;
    for (const auto& r : reports) {
      if (const auto& v = r.*field) sq += (*v - mean) * (*v - mean);
    }
    s.std = std::sqrt(sq / static_cast<double>(s.count - 1));
  }
  return s;
}

}  // namespace

Confusion confusion(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask& fov) {
  require_same_shape(pred, gt, "confusion: prediction and ground truth differ in size");
  require_same_shape(pred, fov, "confusion: prediction and FOV differ in size");
  Confusion c;
  auto p = pred.pixels();
  auto g = gt.pixels();
  auto f = fov.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!f[i]) continue;
    const bool pv = p[i] != 0;
    const bool gv = g[i] != 0;
    if (pv && gv) ++c.tp;
    else if (pv) ++c.fp;
    else if (gv) ++c.fn;
    else ++c.tn;
  }
  return c;
}

MetricsReport metrics(const Confusion& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);
  const double n = tp + fp + tn + fn;

  MetricsReport r;
  r.sen = ratio(tp, tp + fn);
  r.spe = ratio(tn, tn + fp);
  r.acc = ratio(tp + tn, n);
  if (n > 0.0) {
    const double po = (tp + tn) / n;
    const double pe = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / (n * n);
    r.kappa = ratio(po - pe, 1.0 - pe);
  }
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (den > 0.0) r.mcc = (tp * tn - fp * fn) / std::sqrt(den);
  return r;
}

RocCurve roc_auc(const GrayImage& response, const BinaryMask& gt, const BinaryMask& fov, int n_thresholds) {
  require_same_shape(response, gt, "roc_auc: response and ground truth differ in size");
  require_same_shape(response, fov, "roc_auc: response and FOV differ in size");
  if (n_thresholds < 1) throw Error(ErrorKind::InvalidArgument, "roc_auc: need at least one threshold");

  // Histogram over the (theta_{j-1}, theta_j] cells lets every threshold be
  // answered with a suffix sum; cell j counts values v with v <= j/n and
  // v > (j-1)/n, cell 0 everything <= 0.
  const auto cells = static_cast<std::size_t>(n_thresholds) + 2;
  std::vector<std::int64_t> pos(cells, 0), neg(cells, 0);
  auto px = response.pixels();
  auto g = gt.pixels();
  auto f = fov.pixels();
  std::int64_t total_pos = 0;
  std::int64_t total_neg = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!f[i]) continue;
    const double v = px[i];
    // Smallest j with v <= j/n; values above 1 land past the last threshold.
    std::int64_t j = static_cast<std::int64_t>(std::ceil(v * n_thresholds));
    while (j > 0 && v <= static_cast<double>(j - 1) / n_thresholds) --j;
    while (j <= n_thresholds && v > static_cast<double>(j) / n_thresholds) ++j;
    const auto cell = static_cast<std::size_t>(std::clamp<std::int64_t>(j, 0, n_thresholds + 1));
    if (g[i]) {
      ++pos[cell];
      ++total_pos;
    } else {
      ++neg[cell];
      ++total_neg;
    }
  }

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  curve.points.push_back({1.0, 1.0});
  if (total_pos == 0 || total_neg == 0) return curve;

  // Pixels predicted positive at theta_j are those in cells > j.
  std::int64_t above_pos = pos[cells - 1];
  std::int64_t above_neg = neg[cells - 1];
  for (int j = n_thresholds; j >= 0; --j) {
    curve.points.push_back({static_cast<double>(above_neg) / total_neg, static_cast<double>(above_pos) / total_pos});
    above_pos += pos[static_cast<std::size_t>(j)];
    above_neg += neg[static_cast<std::size_t>(j)];
  }
  std::sort(curve.points.begin(), curve.points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  // Thresholds between occupied cells repeat operating points.
  curve.points.erase(std::unique(curve.points.begin(), curve.points.end(),
                                 [](const RocPoint& a, const RocPoint& b) { return a.fpr == b.fpr && a.tpr == b.tpr; }),
                     curve.points.end());
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  curve.auc = area;
  return curve;
}

AggregateReport aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(ErrorKind::InvalidArgument, "aggregate: no reports");
  AggregateReport agg;
  agg.reports = reports;
  agg.sen = summarize(reports, &MetricsReport::sen);
  agg.spe = summarize(reports, &MetricsReport::spe);
  agg.acc = summarize(reports, &MetricsReport::acc);
  agg.auc = summarize(reports, &MetricsReport::auc);
  agg.kappa = summarize(reports, &MetricsReport::kappa);
  agg.mcc = summarize(reports, &MetricsReport::mcc);
  return agg;
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

void write_metrics_csv(std::ostream& os, const std::vector<std::string>& ids, const AggregateReport& agg) {
  if (ids.size() != agg.reports.size()) {
    throw Error(ErrorKind::InvalidArgument, "write_metrics_csv: one id per report required");
  }
  os << "image,sen,spe,acc,auc,kappa,mcc\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& r = agg.reports[i];
    os << ids[i] << ',' << format_metric(r.sen) << ',' << format_metric(r.spe) << ',' << format_metric(r.acc) << ','
       << format_metric(r.auc) << ',' << format_metric(r.kappa) << ',' << format_metric(r.mcc) << '\n';
  }
  os << "mean," << format_metric(agg.sen.mean) << ',' << format_metric(agg.spe.mean) << ','
     << format_metric(agg.acc.mean) << ',' << format_metric(agg.auc.mean) << ',' << format_metric(agg.kappa.mean)
     << ',' << format_metric(agg.mcc.mean) << '\n';
  os << "std," << format_metric(agg.sen.std) << ',' << format_metric(agg.spe.std) << ','
     << format_metric(agg.acc.std) << ',' << format_metric(agg.auc.std) << ',' << format_metric(agg.kappa.std) << ','
     << format_metric(agg.mcc.std) << '\n';
}

}  // namespace vesseltrace
