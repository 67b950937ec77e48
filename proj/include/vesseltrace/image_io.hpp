#pragma once

#include <cstdint>
#include <filesystem>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

// Readers accept 8-bit PNG (gray, gray+alpha, RGB, RGBA; alpha is dropped),
// binary PGM (P5) and binary PPM (P6) with maxval 255. Decoding is bit-exact.
// Writers pick the container from the extension: .png, .pgm or .ppm. Output
// goes to a sibling temporary that is renamed into place on success.

RGBImage load_rgb(const std::filesystem::path& path);

/// Values are byte / 255; RGB input is reduced by channel mean.
GrayImage load_gray(const std::filesystem::path& path);

/// Pixel is true when its (channel-mean) byte value is strictly above threshold.
BinaryMask load_mask(const std::filesystem::path& path, std::uint8_t threshold = 127);

/// round-half-up(255 * clamp(v, 0, 1)).
std::uint8_t quantize(float v) noexcept;

void save_gray(const GrayImage& img, const std::filesystem::path& path);
void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
void save_rgb(const RGBImage& img, const std::filesystem::path& path);

}  // namespace vesseltrace
