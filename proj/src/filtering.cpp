#include "vesseltrace/filtering.hpp"

#include <algorithm>
#include <cmath>

#include "vesseltrace/simd.hpp"

namespace vesseltrace {
namespace {

int half_width_of(std::span<const float> taps) {
  if (taps.empty() || taps.size() % 2 == 0) {
    throw Error(ErrorKind::InvalidArgument, "filter taps must have odd length");
  }
  return static_cast<int>(taps.size() / 2);
}

}  // namespace

Taps gaussian_taps(double sigma, int half_width, TapScale scale) {
  if (!(sigma > 0.0) || half_width < 0) {
    throw Error(ErrorKind::InvalidArgument, "gaussian_taps: sigma must be positive");
  }
  std::vector<double> g(static_cast<std::size_t>(2 * half_width + 1));
  double sum = 0.0;
  for (int x = -half_width; x <= half_width; ++x) {
    const double v = std::exp(-(static_cast<double>(x) * x) / (2.0 * sigma * sigma));
    g[static_cast<std::size_t>(x + half_width)] = v;
    sum += v;
  }
  const double div = scale == TapScale::Peak ? 1.0 : sum;
  Taps taps(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) taps[i] = static_cast<float>(g[i] / div);
  return taps;
}

GrayImage correlate_separable(const GrayImage& img, std::span<const float> taps_x, std::span<const float> taps_y) {
  const int hx = half_width_of(taps_x);
  const int hy = half_width_of(taps_y);
  const int w = img.width();
  const int h = img.height();
  const auto& k = simd::kernels();

  GrayImage horiz(w, h, 0.0f);
  std::vector<float> padded(static_cast<std::size_t>(w + 2 * hx), 0.0f);
  for (int y = 0; y < h; ++y) {
    std::copy(img.row(y).begin(), img.row(y).end(), padded.begin() + hx);
    float* out = horiz.row(y).data();
    for (int a = -hx; a <= hx; ++a) {
      k.accumulate(out, padded.data() + hx + a, taps_x[static_cast<std::size_t>(a + hx)], static_cast<std::size_t>(w));
    }
  }

  GrayImage out(w, h, 0.0f);
  for (int y = 0; y < h; ++y) {
    float* dst = out.row(y).data();
    for (int b = -hy; b <= hy; ++b) {
      const int src_y = y + b;
      if (src_y < 0 || src_y >= h) continue;
      k.accumulate(dst, horiz.row(src_y).data(), taps_y[static_cast<std::size_t>(b + hy)], static_cast<std::size_t>(w));
    }
  }
  return out;
}

GrayImage weighted_max_separable(const GrayImage& img, std::span<const float> taps, int margin) {
  const int r = half_width_of(taps);
  if (margin < 0) {
    throw Error(ErrorKind::InvalidArgument, "weighted_max_separable: negative margin");
  }
  const int w = img.width();
  const int h = img.height();
  const int ow = w + 2 * margin;
  const int oh = h + 2 * margin;
  const auto& k = simd::kernels();

  // Rows outside the raster are all zero after the horizontal pass, so only
  // the h source rows are materialized.
  GrayImage horiz(ow, h, 0.0f);
  std::vector<float> padded(static_cast<std::size_t>(w + 2 * (margin + r)), 0.0f);
  for (int y = 0; y < h; ++y) {
    std::copy(img.row(y).begin(), img.row(y).end(), padded.begin() + margin + r);
    float* out = horiz.row(y).data();
    for (int a = -r; a <= r; ++a) {
      k.max_scaled(out, padded.data() + r - a, taps[static_cast<std::size_t>(a + r)], static_cast<std::size_t>(ow));
    }
  }

  GrayImage out(ow, oh, 0.0f);
  for (int oy = 0; oy < oh; ++oy) {
    const int q = oy - margin;
    float* dst = out.row(oy).data();
    for (int b = -r; b <= r; ++b) {
      const int src_y = q - b;
      if (src_y < 0 || src_y >= h) continue;
      k.max_scaled(dst, horiz.row(src_y).data(), taps[static_cast<std::size_t>(b + r)], static_cast<std::size_t>(ow));
    }
  }
  return out;
}

}  // namespace vesseltrace
