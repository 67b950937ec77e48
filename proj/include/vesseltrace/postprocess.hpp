#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

enum class Connectivity { Four = 4, Eight = 8 };

struct LabelMap {
  Raster<std::int32_t> labels;     ///< 0 = background, components are 1..count()
  std::vector<std::size_t> sizes;  ///< sizes[label]; sizes[0] is unused and 0

  std::size_t count() const noexcept { return sizes.empty() ? 0 : sizes.size() - 1; }
};

struct PostprocessConfig {
  std::size_t min_cluster = 11;
  int otsu_bins = 256;
  Connectivity connectivity = Connectivity::Eight;

  void validate() const;
  friend bool operator==(const PostprocessConfig&, const PostprocessConfig&) = default;
};

/// Histogram bin of v in [0, 1] for `n_bins` uniform bins (k/n, (k+1)/n];
/// 0 falls in bin 0. Values above a bin's upper edge never share its bin, so
/// a strict `>` test against that edge splits exactly at bin boundaries.
int histogram_bin(float v, int n_bins) noexcept;

/// Otsu's global threshold over the region: the upper edge (k+1)/n_bins of
/// the bin k maximizing between-class variance, lowest k on ties.
double otsu_threshold(const GrayImage& img, const BinaryMask& region, int n_bins = 256);

/// img > threshold inside region, false elsewhere.
BinaryMask binarize(const GrayImage& img, double threshold, const BinaryMask& region);

/// Two-pass union-find labeling; labels follow raster first-encounter order.
LabelMap connected_components(const BinaryMask& mask, Connectivity connectivity);

/// Clears every component with fewer than `min_size` pixels.
BinaryMask remove_small_clusters(const BinaryMask& mask, std::size_t min_size, Connectivity connectivity);

BinaryMask postprocess_pipeline(const GrayImage& response, const BinaryMask& fov, const PostprocessConfig& cfg);

}  // namespace vesseltrace
