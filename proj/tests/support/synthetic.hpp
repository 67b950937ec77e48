#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace::testing {

struct SyntheticFundus {
  RGBImage image;
  BinaryMask fov;
  BinaryMask vessels;  ///< pixels within half the stroke's FWHM of its centerline
};

struct SyntheticOptions {
  int width = 320;
  int height = 320;
  int strokes = 14;
  double min_width = 2.0;  ///< stroke FWHM, pixels
  double max_width = 6.0;
  double contrast = 0.22;  ///< green-channel darkening at a stroke center
  double texture = 0.03;   ///< amplitude of the low-frequency background texture
  double noise = 0.012;    ///< per-pixel Gaussian noise sigma
  bool bright_lesions = false;
};

/// Dark Gaussian-profile curvilinear strokes on a textured, unevenly lit
/// bright disk, rendered as an RGB fundus-like image. Deterministic in seed.
SyntheticFundus make_synthetic_fundus(std::uint64_t seed, const SyntheticOptions& options = {});

/// Writes a PNG tree laid out like a converted DRIVE split under root:
/// images/<id>_<split>.png, mask/<id>_<split>_mask.png,
/// 1st_manual/<id>_manual1.png and, for the test split, 2nd_manual/<id>_manual2.png
/// (the second observer sees the strokes one pixel thinner). Returns the ids.
std::vector<std::string> write_fake_drive(const std::filesystem::path& root, const std::string& split, int n_cases,
                                          std::uint64_t seed, const SyntheticOptions& options = {});

/// Copy of the pixels. Use in range-for over a temporary raster, whose
/// pixels() span would dangle.
template <typename T>
std::vector<T> values(const Raster<T>& r) {
  return {r.pixels().begin(), r.pixels().end()};
}

/// 2|A and B| / (|A| + |B|).
double dice(const BinaryMask& a, const BinaryMask& b);

}  // namespace vesseltrace::testing
