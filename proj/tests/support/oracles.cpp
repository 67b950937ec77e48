#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

namespace vesseltrace::testing {

Raster<double> dense_correlate(const GrayImage& img, const Kernel2D& kernel) {
  const int h = kernel.half_width;
  Raster<double> out(img.width(), img.height(), 0.0);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0.0;
      for (int b = -h; b <= h; ++b) {
        for (int a = -h; a <= h; ++a) {
          if (img.contains(x + a, y + b)) acc += kernel.at(a, b) * img(x + a, y + b);
        }
      }
      out(x, y) = acc;
    }
  }
  return out;
}

namespace {

GrayImage brute_window(const GrayImage& img, int radius, bool take_min) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      float best = take_min ? std::numeric_limits<float>::infinity() : -std::numeric_limits<float>::infinity();
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx * dx + dy * dy > radius * radius || !img.contains(x + dx, y + dy)) continue;
          const float v = img(x + dx, y + dy);
          best = take_min ? std::min(best, v) : std::max(best, v);
        }
      }
      out(x, y) = best;
    }
  }
  return out;
}

}  // namespace

GrayImage brute_erode(const GrayImage& img, int radius) { return brute_window(img, radius, true); }
GrayImage brute_dilate(const GrayImage& img, int radius) { return brute_window(img, radius, false); }

FloodFill flood_fill_components(const BinaryMask& mask, Connectivity connectivity) {
  FloodFill out{Raster<std::int32_t>(mask.width(), mask.height(), 0), {0}};
  std::vector<std::pair<int, int>> steps{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  if (connectivity == Connectivity::Eight) {
    steps.insert(steps.end(), {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
  }
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || out.labels(x, y) != 0) continue;
      const auto label = static_cast<std::int32_t>(out.sizes.size());
      out.sizes.push_back(0);
      std::deque<std::pair<int, int>> queue{{x, y}};
      out.labels(x, y) = label;
      while (!queue.empty()) {
        const auto [px, py] = queue.front();
        queue.pop_front();
        ++out.sizes.back();
        for (const auto& [sx, sy] : steps) {
          const int nx = px + sx;
          const int ny = py + sy;
          if (mask.contains(nx, ny) && mask(nx, ny) && out.labels(nx, ny) == 0) {
            out.labels(nx, ny) = label;
            queue.emplace_back(nx, ny);
          }
        }
      }
    }
  }
  return out;
}

bool same_partition(const Raster<std::int32_t>& a, const Raster<std::int32_t>& b) {
  if (!a.same_shape(b)) return false;
  std::map<std::int32_t, std::int32_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto la = a.pixels()[i];
    const auto lb = b.pixels()[i];
    if ((la == 0) != (lb == 0)) return false;
    if (la == 0) continue;
    if (ab.emplace(la, lb).first->second != lb) return false;
    if (ba.emplace(lb, la).first->second != la) return false;
  }
  return true;
}

int otsu_exhaustive_bin(const GrayImage& img, const BinaryMask& region, int n_bins) {
  // Level of each pixel: smallest k with v <= (k + 1) / n.
  std::vector<std::int64_t> levels;
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (!region.pixels()[i]) continue;
    const double v = img.pixels()[i];
    int k = 0;
    while (k < n_bins - 1 && v > static_cast<double>(k + 1) / n_bins) ++k;
    levels.push_back(k);
  }
  int best_k = 0;
  // Variance as an exact fraction (S0*n1 - S1*n0)^2 / (n0*n1).
  unsigned __int128 best_num = 0;
  unsigned __int128 best_den = 1;
  for (int k = 0; k < n_bins; ++k) {
    std::int64_t n0 = 0, n1 = 0, s0 = 0, s1 = 0;
    for (std::int64_t level : levels) {
      if (level <= k) {
        ++n0;
        s0 += level;
      } else {
        ++n1;
        s1 += level;
      }
    }
    unsigned __int128 num = 0;
    unsigned __int128 den = 1;
    if (n0 > 0 && n1 > 0) {
      const __int128 d = static_cast<__int128>(s0) * n1 - static_cast<__int128>(s1) * n0;
      const auto m = static_cast<unsigned __int128>(d < 0 ? -d : d);
      num = m * m;
      den = static_cast<unsigned __int128>(n0) * static_cast<unsigned __int128>(n1);
    }
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_k = k;
    }
  }
  return best_k;
}

double mann_whitney_auc(const GrayImage& response, const BinaryMask& gt, const BinaryMask& fov) {
  std::vector<float> pos, neg;
  for (std::size_t i = 0; i < response.size(); ++i) {
    if (!fov.pixels()[i]) continue;
    (gt.pixels()[i] ? pos : neg).push_back(response.pixels()[i]);
  }
  double score = 0.0;
  for (float p : pos) {
    for (float n : neg) {
      score += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
    }
  }
  return score / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

GrayImage dense_blur_shift(const GrayImage& c, const FilterTuple& tuple, const BCosfireConfig& cfg) {
  const double sp = cfg.sigma0 + cfg.alpha * tuple.rho;
  const int r = sp > 0 ? static_cast<int>(std::ceil(3.0 * sp)) : 0;
  const int dx = static_cast<int>(std::lround(tuple.rho * std::cos(tuple.phi)));
  const int dy = static_cast<int>(std::lround(-tuple.rho * std::sin(tuple.phi)));
  GrayImage out(c.width(), c.height(), 0.0f);
  for (int y = 0; y < c.height(); ++y) {
    for (int x = 0; x < c.width(); ++x) {
      double best = 0.0;
      for (int b = -r; b <= r; ++b) {
        for (int a = -r; a <= r; ++a) {
          const int sx = x + dx - a;
          const int sy = y + dy - b;
          if (!c.contains(sx, sy)) continue;
          const double g = sp > 0 ? std::exp(-(a * a + b * b) / (2.0 * sp * sp)) : 1.0;
          best = std::max(best, c(sx, sy) * g);
        }
      }
      out(x, y) = static_cast<float>(best);
    }
  }
  return out;
}

Raster<double> direct_geometric_mean(std::span<const GrayImage> stack, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  Raster<double> out(stack.front().width(), stack.front().height(), 0.0);
  for (std::size_t p = 0; p < out.size(); ++p) {
    double prod = 1.0;
    for (std::size_t i = 0; i < stack.size(); ++i) prod *= std::pow(static_cast<double>(stack[i].pixels()[p]), weights[i]);
    out.pixels()[p] = std::pow(prod, 1.0 / total);
  }
  return out;
}

}  // namespace vesseltrace::testing
