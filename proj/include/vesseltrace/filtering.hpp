#pragma once

#include <span>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

/// Odd-length symmetric 1-D taps, index h is the center.
using Taps = std::vector<float>;

enum class TapScale {
  Peak,     ///< center tap is 1
  UnitSum,  ///< taps sum to 1 over the support (discrete unit mass)
};

/// Samples exp(-x^2 / (2 sigma^2)) for |x| <= half_width, scaled per `scale`.
Taps gaussian_taps(double sigma, int half_width, TapScale scale);

/// Separable 2-D correlation with zero padding outside the raster.
/// Taps are applied in ascending offset order, so results do not depend on
/// which SIMD kernel table is active.
GrayImage correlate_separable(const GrayImage& img, std::span<const float> taps_x, std::span<const float> taps_y);

/// out(p, q) = max over |a|,|b| <= h of taps[a] * taps[b] * img(p - a, q - b),
/// reading 0 outside the raster. The output covers the input extended by
/// `margin` pixels on every side: out(x + margin, y + margin) is position (x, y).
/// Requires img >= 0 and taps >= 0.
GrayImage weighted_max_separable(const GrayImage& img, std::span<const float> taps, int margin);

}  // namespace vesseltrace
