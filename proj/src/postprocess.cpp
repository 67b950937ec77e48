#include "vesseltrace/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vesseltrace {
namespace {

class DisjointSet {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }

  std::int32_t find(std::int32_t x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Smaller index wins so roots are deterministic.
    if (b < a) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
  }

 private:
  std::vector<std::int32_t> parent_;
};

// Between-class variance is proportional to (N*S0 - n0*S)^2 / (n0*n1), with
// S0 and S the level sums of class 0 and of everything. Kept as an exact
// integer fraction so ties are genuine ties.
struct VarianceFraction {
  unsigned __int128 num_sq = 0;
  unsigned __int128 den = 1;
};

bool greater_than(const VarianceFraction& a, const VarianceFraction& b, bool exact) {
  if (exact) {
    return a.num_sq * b.den > b.num_sq * a.den;
  }
  return static_cast<long double>(a.num_sq) / static_cast<long double>(a.den) >
         static_cast<long double>(b.num_sq) / static_cast<long double>(b.den);
}

}  // namespace

void PostprocessConfig::validate() const {
  if (otsu_bins < 2) {
    throw Error(ErrorKind::OutOfRange, "post.otsu_bins must be >= 2");
  }
  if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
    throw Error(ErrorKind::OutOfRange, "post.connectivity must be 4 or 8");
  }
}

int histogram_bin(float v, int n_bins) noexcept {
  const double scaled = std::ceil(static_cast<double>(v) * n_bins) - 1.0;
  return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(n_bins - 1)));
}

double otsu_threshold(const GrayImage& img, const BinaryMask& region, int n_bins) {
  require_same_shape(img, region, "otsu_threshold: image and region differ in size");
  if (n_bins < 2) {
    throw Error(ErrorKind::InvalidArgument, "otsu_threshold: need at least 2 bins");
  }
  std::vector<std::int64_t> hist(static_cast<std::size_t>(n_bins), 0);
  auto px = img.pixels();
  auto inside = region.pixels();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (!inside[i]) continue;
    if (!(px[i] >= 0.0f && px[i] <= 1.0f)) {
      throw Error(ErrorKind::OutOfRange, "otsu_threshold expects values in [0, 1]");
    }
    ++hist[static_cast<std::size_t>(histogram_bin(px[i], n_bins))];
    ++total;
  }
  if (total == 0) {
    throw Error(ErrorKind::EmptyRegion, "otsu_threshold: region is empty");
  }
  std::int64_t level_sum = 0;
  for (int k = 0; k < n_bins; ++k) level_sum += hist[static_cast<std::size_t>(k)] * k;

  // Exact products need num^2 * den < 2^128; num <= N^2 * bins, den <= N^2 / 4.
  const long double bound = std::pow(static_cast<long double>(total), 6) * n_bins * n_bins / 4;
  const bool exact = bound < 1.0e38L;

  int best_k = 0;
  VarianceFraction best;
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  for (int k = 0; k < n_bins; ++k) {
    n0 += hist[static_cast<std::size_t>(k)];
    s0 += hist[static_cast<std::size_t>(k)] * k;
    const std::int64_t n1 = total - n0;
    VarianceFraction v;
    if (n0 > 0 && n1 > 0) {
      const __int128 num = static_cast<__int128>(total) * s0 - static_cast<__int128>(n0) * level_sum;
      const unsigned __int128 mag = static_cast<unsigned __int128>(num < 0 ? -num : num);
      v.num_sq = mag * mag;
      v.den = static_cast<unsigned __int128>(n0) * static_cast<unsigned __int128>(n1);
    }
    if (k == 0 || greater_than(v, best, exact)) {
      best = v;
      best_k = k;
    }
  }
  return static_cast<double>(best_k + 1) / n_bins;
}

BinaryMask binarize(const GrayImage& img, double threshold, const BinaryMask& region) {
  require_same_shape(img, region, "binarize: image and region differ in size");
  BinaryMask out(img.width(), img.height(), 0);
  auto px = img.pixels();
  auto inside = region.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    dst[i] = (inside[i] && static_cast<double>(px[i]) > threshold) ? 1 : 0;
  }
  return out;
}

LabelMap connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  Raster<std::int32_t> provisional(w, h, -1);
  DisjointSet sets;

  const bool eight = connectivity == Connectivity::Eight;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      std::int32_t label = -1;
      auto visit = [&](int nx, int ny) {
        if (!provisional.contains(nx, ny)) return;
        const std::int32_t other = provisional(nx, ny);
        if (other < 0) return;
        if (label < 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      visit(x - 1, y);
      visit(x, y - 1);
      if (eight) {
        visit(x - 1, y - 1);
        visit(x + 1, y - 1);
      }
      provisional(x, y) = label >= 0 ? label : sets.make();
    }
  }

  LabelMap out{Raster<std::int32_t>(w, h, 0), {0}};
  std::vector<std::int32_t> final_label;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = provisional(x, y);
      if (p < 0) continue;
      const auto root = static_cast<std::size_t>(sets.find(p));
      if (root >= final_label.size()) final_label.resize(root + 1, 0);
      if (final_label[root] == 0) {
        out.sizes.push_back(0);
        final_label[root] = static_cast<std::int32_t>(out.sizes.size() - 1);
      }
      const std::int32_t label = final_label[root];
      out.labels(x, y) = label;
      ++out.sizes[static_cast<std::size_t>(label)];
    }
  }
  return out;
}

BinaryMask remove_small_clusters(const BinaryMask& mask, std::size_t min_size, Connectivity connectivity) {
  if (min_size == 0) return mask;
  const LabelMap cc = connected_components(mask, connectivity);
  BinaryMask out(mask.width(), mask.height(), 0);
  auto labels = cc.labels.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto label = static_cast<std::size_t>(labels[i]);
    dst[i] = (label != 0 && cc.sizes[label] >= min_size) ? 1 : 0;
  }
  return out;
}

BinaryMask postprocess_pipeline(const GrayImage& response, const BinaryMask& fov, const PostprocessConfig& cfg) {
  cfg.validate();
  require_same_shape(response, fov, "postprocess: response and FOV differ in size");
  const double threshold = otsu_threshold(response, fov, cfg.otsu_bins);
  return remove_small_clusters(binarize(response, threshold, fov), cfg.min_cluster, cfg.connectivity);
}

}  // namespace vesseltrace
