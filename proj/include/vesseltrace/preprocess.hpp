#pragma once

#include <utility>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

/// Discrete disk {(dx, dy) : dx^2 + dy^2 <= radius^2}.
class StructuringElement {
 public:
  struct Offset {
    int dx;
    int dy;
    friend bool operator==(const Offset&, const Offset&) = default;
  };

  static StructuringElement disk(int radius);

  int radius() const noexcept { return radius_; }
  const std::vector<Offset>& offsets() const noexcept { return offsets_; }
  /// Half-width of the horizontal run at row dy, for dy in [-radius, radius].
  int run_half_width(int dy) const noexcept { return runs_[static_cast<std::size_t>(dy + radius_)]; }

 private:
  explicit StructuringElement(int radius);

  int radius_;
  std::vector<Offset> offsets_;
  std::vector<int> runs_;
};

struct PreprocessConfig {
  int tophat_radius = 8;
  int pad_width = 30;
  int clahe_tiles_x = 8;
  int clahe_tiles_y = 8;
  double clahe_clip = 3.0;
  int clahe_bins = 256;
  /// When false the top-hat stage passes its input through unchanged.
  bool tophat_enabled = true;
  /// Channel-mean luminance cut used when no FOV mask file is supplied.
  double fov_threshold = 0.1;

  void validate() const;
  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

GrayImage green_channel(const RGBImage& img);

/// Channel-mean luminance above `luminance_threshold` (in [0, 1]), restricted
/// to the largest 8-connected component.
BinaryMask derive_fov_mask(const RGBImage& img, double luminance_threshold);

struct PaddedImage {
  GrayImage image;
  BinaryMask mask;
};

/// Grows the FOV `width` times; each round, every pixel 8-adjacent to the
/// current mask takes the mean of its in-mask 8-neighbors and joins the mask.
PaddedImage fake_pad(const GrayImage& img, const BinaryMask& fov, int width);

// Grayscale morphology with a shrinking window at the raster border.
GrayImage gray_erode(const GrayImage& img, const StructuringElement& se);
GrayImage gray_dilate(const GrayImage& img, const StructuringElement& se);
GrayImage gray_open(const GrayImage& img, const StructuringElement& se);

/// img - open(img); nonnegative everywhere.
GrayImage white_top_hat(const GrayImage& img, const StructuringElement& se);

/// Contrast-limited adaptive histogram equalization of a [0, 1] image.
///
/// Each tile of the clahe_tiles_x x clahe_tiles_y grid gets a histogram of
/// clahe_bins bins, clipped at clahe_clip * (tile pixels / bins) with the
/// excess spread evenly over all bins; its mapping is the normalized CDF.
/// A tile whose pixels all fall into one bin maps identically. Every pixel is
/// bilinearly interpolated between the four nearest tile-center mappings,
/// clamped at the border.
GrayImage clahe(const GrayImage& img, const PreprocessConfig& cfg);

struct PreprocessResult {
  GrayImage image;  ///< normalized to [0, 1] over `fov`
  BinaryMask fov;   ///< FOV extended by fake padding

  struct Stages {
    GrayImage green;
    GrayImage inverted;
    GrayImage padded;
    GrayImage tophat;
    GrayImage clahe;
  } stages;
};

/// green -> invert -> fake_pad -> white_top_hat -> clahe -> normalize01.
PreprocessResult preprocess_pipeline(const RGBImage& img, const BinaryMask& fov, const PreprocessConfig& cfg);

}  // namespace vesseltrace
