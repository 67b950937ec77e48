#include <algorithm>
#include <cmath>
#include <limits>

#include "vesseltrace/preprocess.hpp"
#include "vesseltrace/simd.hpp"

namespace vesseltrace {
namespace {

enum class Extremum { Min, Max };

// The disk is a stack of centered horizontal runs. Run extrema of every
// half-width 0..r are built incrementally per row, then each output row folds
// the 2r+1 rows of the stack. Out-of-raster offsets are skipped.
GrayImage windowed_extremum(const GrayImage& img, const StructuringElement& se, Extremum op) {
  const int w = img.width();
  const int h = img.height();
  const int r = se.radius();
  const auto& k = simd::kernels();
  const auto fold = op == Extremum::Min ? k.min_into : k.max_into;

  std::vector<GrayImage> runs;
  runs.reserve(static_cast<std::size_t>(r) + 1);
  runs.push_back(img);
  for (int hw = 1; hw <= r; ++hw) {
    GrayImage next = runs.back();
    if (hw < w) {
      const auto n = static_cast<std::size_t>(w - hw);
      for (int y = 0; y < h; ++y) {
        float* dst = next.row(y).data();
        const float* src = img.row(y).data();
        fold(dst + hw, src, n);  // left neighbor x - hw
        fold(dst, src + hw, n);  // right neighbor x + hw
      }
    }
    runs.push_back(std::move(next));
  }

  const float init = op == Extremum::Min ? std::numeric_limits<float>::infinity()
                                         : -std::numeric_limits<float>::infinity();
  GrayImage out(w, h, init);
  for (int y = 0; y < h; ++y) {
    float* dst = out.row(y).data();
    for (int dy = -r; dy <= r; ++dy) {
      const int sy = y + dy;
      if (sy < 0 || sy >= h) continue;
      fold(dst, runs[static_cast<std::size_t>(se.run_half_width(dy))].row(sy).data(), static_cast<std::size_t>(w));
    }
  }
  return out;
}

}  // namespace

StructuringElement::StructuringElement(int radius) : radius_(radius) {
  if (radius < 0) {
    throw Error(ErrorKind::InvalidArgument, "structuring element radius must be >= 0");
  }
  runs_.resize(static_cast<std::size_t>(2 * radius + 1));
  for (int dy = -radius; dy <= radius; ++dy) {
    int hw = 0;
    while ((hw + 1) * (hw + 1) + dy * dy <= radius * radius) ++hw;
    runs_[static_cast<std::size_t>(dy + radius)] = hw;
    for (int dx = -hw; dx <= hw; ++dx) {
      offsets_.push_back({dx, dy});
    }
  }
}

StructuringElement StructuringElement::disk(int radius) { return StructuringElement(radius); }

GrayImage gray_erode(const GrayImage& img, const StructuringElement& se) {
  return windowed_extremum(img, se, Extremum::Min);
}

GrayImage gray_dilate(const GrayImage& img, const StructuringElement& se) {
  return windowed_extremum(img, se, Extremum::Max);
}

GrayImage gray_open(const GrayImage& img, const StructuringElement& se) { return gray_dilate(gray_erode(img, se), se); }

GrayImage white_top_hat(const GrayImage& img, const StructuringElement& se) {
  GrayImage out = gray_open(img, se);
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    // Opening is anti-extensive, so this is exact and >= 0.
    dst[i] = src[i] - dst[i];
  }
  return out;
}

}  // namespace vesseltrace
