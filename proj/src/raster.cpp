#include "vesseltrace/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vesseltrace {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileMissing: return "file-missing";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::TruncatedStream: return "truncated-stream";
    case ErrorKind::Unwritable: return "unwritable";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::EmptyMask: return "empty-mask";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::ParseError: return "parse-error";
    case ErrorKind::UnknownKey: return "unknown-key";
    case ErrorKind::TypeMismatch: return "type-mismatch";
    case ErrorKind::MissingDirectory: return "missing-directory";
    case ErrorKind::IncompleteCase: return "incomplete-case";
    case ErrorKind::OversizedGrid: return "oversized-grid";
  }
  return "unknown";
}

GrayImage invert(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const float v = src[i];
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw Error(ErrorKind::OutOfRange, "invert expects values in [0, 1]");
    }
    dst[i] = 1.0f - v;
  }
  return out;
}

GrayImage normalize01(const GrayImage& img, const BinaryMask& region) {
  require_same_shape(img, region, "normalize01: image and region differ in size");
  float lo = std::numeric_limits<float>::infinity();
  float hi = -std::numeric_limits<float>::infinity();
  auto src = img.pixels();
  auto inside = region.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (inside[i]) {
      lo = std::min(lo, src[i]);
      hi = std::max(hi, src[i]);
    }
  }
  if (lo > hi) {
    throw Error(ErrorKind::EmptyRegion, "normalize01: region is empty");
  }
  GrayImage out(img.width(), img.height(), 0.0f);
  if (hi == lo) {
    return out;
  }
  const double scale = 1.0 / (static_cast<double>(hi) - lo);
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double v = (static_cast<double>(src[i]) - lo) * scale;
    dst[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

std::size_t count_true(const BinaryMask& mask) noexcept {
  return static_cast<std::size_t>(
      std::count_if(mask.pixels().begin(), mask.pixels().end(), [](std::uint8_t v) { return v != 0; }));
}

}  // namespace vesseltrace
