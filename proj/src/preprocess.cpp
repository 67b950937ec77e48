#include "vesseltrace/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "vesseltrace/postprocess.hpp"

namespace vesseltrace {

void PreprocessConfig::validate() const {
  if (tophat_radius < 1) throw Error(ErrorKind::OutOfRange, "preprocess.tophat_radius must be >= 1");
  if (pad_width < 0) throw Error(ErrorKind::OutOfRange, "preprocess.pad_width must be >= 0");
  if (clahe_tiles_x < 1 || clahe_tiles_y < 1) throw Error(ErrorKind::OutOfRange, "preprocess.clahe_tiles_* must be >= 1");
  if (!(clahe_clip >= 1.0)) throw Error(ErrorKind::OutOfRange, "preprocess.clahe_clip must be >= 1");
  if (clahe_bins < 2) throw Error(ErrorKind::OutOfRange, "preprocess.clahe_bins must be >= 2");
  if (!(fov_threshold >= 0.0 && fov_threshold <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "preprocess.fov_threshold must lie in [0, 1]");
  }
}

GrayImage green_channel(const RGBImage& img) {
  GrayImage out(img.width(), img.height());
  std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                 [](const Rgb& p) { return static_cast<float>(p.g / 255.0); });
  return out;
}

BinaryMask derive_fov_mask(const RGBImage& img, double luminance_threshold) {
  BinaryMask bright(img.width(), img.height(), 0);
  auto src = img.pixels();
  auto dst = bright.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double mean = (src[i].r + src[i].g + src[i].b) / 3.0 / 255.0;
    dst[i] = mean > luminance_threshold ? 1 : 0;
  }
  const LabelMap cc = connected_components(bright, Connectivity::Eight);
  if (cc.count() == 0) {
    throw Error(ErrorKind::EmptyMask, "no pixel above the FOV luminance threshold");
  }
  std::size_t keep = 1;
  for (std::size_t label = 2; label < cc.sizes.size(); ++label) {
    if (cc.sizes[label] > cc.sizes[keep]) keep = label;
  }
  BinaryMask out(img.width(), img.height(), 0);
  auto labels = cc.labels.pixels();
  auto mask = out.pixels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    mask[i] = static_cast<std::size_t>(labels[i]) == keep ? 1 : 0;
  }
  return out;
}

PaddedImage fake_pad(const GrayImage& img, const BinaryMask& fov, int width) {
  require_same_shape(img, fov, "fake_pad: image and FOV differ in size");
  if (width < 0) throw Error(ErrorKind::InvalidArgument, "fake_pad: negative width");
  PaddedImage out{img, BinaryMask(fov.width(), fov.height(), 0)};
  std::transform(fov.pixels().begin(), fov.pixels().end(), out.mask.pixels().begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 1 : 0; });
  if (count_true(out.mask) == 0) {
    throw Error(ErrorKind::EmptyMask, "fake_pad: FOV is empty");
  }

  const int w = img.width();
  const int h = img.height();
  struct Fill {
    int x;
    int y;
    float value;
  };
  std::vector<Fill> frontier;
  for (int round = 0; round < width; ++round) {
    frontier.clear();
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (out.mask(x, y)) continue;
        double sum = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if ((dx || dy) && out.mask.contains(nx, ny) && out.mask(nx, ny)) {
              sum += out.image(nx, ny);
              ++n;
            }
          }
        }
        if (n > 0) frontier.push_back({x, y, static_cast<float>(sum / n)});
      }
    }
    if (frontier.empty()) break;
    // Applied after the scan so every pixel of a round sees the same mask.
    for (const Fill& f : frontier) {
      out.image(f.x, f.y) = f.value;
      out.mask(f.x, f.y) = 1;
    }
  }
  return out;
}

GrayImage clahe(const GrayImage& img, const PreprocessConfig& cfg) {
  cfg.validate();
  const int w = img.width();
  const int h = img.height();
  if (w == 0 || h == 0) return img;
  const int tiles_x = std::min(cfg.clahe_tiles_x, w);
  const int tiles_y = std::min(cfg.clahe_tiles_y, h);
  const int bins = cfg.clahe_bins;

  auto bin_of = [bins](float v) {
    return std::clamp(static_cast<int>(std::floor(static_cast<double>(v) * bins)), 0, bins - 1);
  };
  auto edges = [](int extent, int tiles) {
    std::vector<int> e(static_cast<std::size_t>(tiles) + 1);
    for (int i = 0; i <= tiles; ++i) e[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long>(i) * extent / tiles);
    return e;
  };
  const std::vector<int> xe = edges(w, tiles_x);
  const std::vector<int> ye = edges(h, tiles_y);

  for (float v : img.pixels()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorKind::OutOfRange, "clahe expects values in [0, 1]");
    }
  }

  // An empty lut marks an identity tile.
  std::vector<std::vector<float>> luts(static_cast<std::size_t>(tiles_x * tiles_y));
  std::vector<double> hist(static_cast<std::size_t>(bins));
  for (int ty = 0; ty < tiles_y; ++ty) {
    for (int tx = 0; tx < tiles_x; ++tx) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (int y = ye[static_cast<std::size_t>(ty)]; y < ye[static_cast<std::size_t>(ty) + 1]; ++y) {
        for (int x = xe[static_cast<std::size_t>(tx)]; x < xe[static_cast<std::size_t>(tx) + 1]; ++x) {
          hist[static_cast<std::size_t>(bin_of(img(x, y)))] += 1.0;
        }
      }
      const auto occupied = std::count_if(hist.begin(), hist.end(), [](double c) { return c > 0.0; });
      if (occupied <= 1) continue;

      double pixels = 0.0;
      for (double c : hist) pixels += c;
      const double limit = cfg.clahe_clip * pixels / bins;
      double excess = 0.0;
      for (double& c : hist) {
        if (c > limit) {
          excess += c - limit;
          c = limit;
        }
      }
      const double spread = excess / bins;
      auto& lut = luts[static_cast<std::size_t>(ty * tiles_x + tx)];
      lut.resize(static_cast<std::size_t>(bins));
      double cdf = 0.0;
      for (int b = 0; b < bins; ++b) {
        cdf += hist[static_cast<std::size_t>(b)] + spread;
        lut[static_cast<std::size_t>(b)] = static_cast<float>(std::min(1.0, cdf / pixels));
      }
    }
  }

  auto centers = [](const std::vector<int>& e) {
    std::vector<double> c(e.size() - 1);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) c[i] = (e[i] + e[i + 1] - 1) / 2.0;
    return c;
  };
  const std::vector<double> cx = centers(xe);
  const std::vector<double> cy = centers(ye);

  // Lower tile index and weight of the upper one along one axis.
  auto locate = [](const std::vector<double>& c, int p, int& lo, double& t) {
    const int n = static_cast<int>(c.size());
    if (p <= c.front()) {
      lo = 0;
      t = 0.0;
      return;
    }
    if (p >= c.back()) {
      lo = n - 1;
      t = 0.0;
      return;
    }
    lo = static_cast<int>(std::upper_bound(c.begin(), c.end(), static_cast<double>(p)) - c.begin()) - 1;
    t = (p - c[static_cast<std::size_t>(lo)]) / (c[static_cast<std::size_t>(lo) + 1] - c[static_cast<std::size_t>(lo)]);
  };

  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    int ty0 = 0;
    double fy = 0.0;
    locate(cy, y, ty0, fy);
    const int ty1 = std::min(ty0 + 1, tiles_y - 1);
    for (int x = 0; x < w; ++x) {
      int tx0 = 0;
      double fx = 0.0;
      locate(cx, x, tx0, fx);
      const int tx1 = std::min(tx0 + 1, tiles_x - 1);
      const float v = img(x, y);
      const int b = bin_of(v);
      auto map = [&](int tx, int ty) -> double {
        const auto& lut = luts[static_cast<std::size_t>(ty * tiles_x + tx)];
        return lut.empty() ? v : lut[static_cast<std::size_t>(b)];
      };
      const double top = (1.0 - fx) * map(tx0, ty0) + fx * map(tx1, ty0);
      const double bottom = (1.0 - fx) * map(tx0, ty1) + fx * map(tx1, ty1);
      out(x, y) = static_cast<float>(std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0));
    }
  }
  return out;
}

PreprocessResult preprocess_pipeline(const RGBImage& img, const BinaryMask& fov, const PreprocessConfig& cfg) {
  cfg.validate();
  require_same_shape(img, fov, "preprocess: image and FOV differ in size");
  PreprocessResult r;
  r.stages.green = green_channel(img);
  r.stages.inverted = invert(r.stages.green);
  PaddedImage padded = fake_pad(r.stages.inverted, fov, cfg.pad_width);
  r.stages.padded = std::move(padded.image);
  r.fov = std::move(padded.mask);
  r.stages.tophat = cfg.tophat_enabled
                        ? white_top_hat(r.stages.padded, StructuringElement::disk(cfg.tophat_radius))
                        : r.stages.padded;
  r.stages.clahe = clahe(r.stages.tophat, cfg);
  r.image = normalize01(r.stages.clahe, r.fov);
  return r;
}

}  // namespace vesseltrace
