#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vesseltrace/error.hpp"

namespace vesseltrace {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 2-D raster. x is the column (rightward), y the row (downward).
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), pixels_(checked_size(width, height), fill) {}
  Raster(int width, int height, std::vector<T> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_size(width, height)) {
      throw Error(ErrorKind::InvalidArgument, "pixel count does not match width x height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }
  bool empty() const noexcept { return pixels_.empty(); }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& operator()(int x, int y) noexcept { return pixels_[index(x, y)]; }
  const T& operator()(int x, int y) const noexcept { return pixels_[index(x, y)]; }

  std::span<T> row(int y) noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const T> row(int y) const noexcept {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  std::span<T> pixels() noexcept { return pixels_; }
  std::span<const T> pixels() const noexcept { return pixels_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checked_size(int width, int height) {
    if (width < 0 || height < 0) {
      throw Error(ErrorKind::InvalidArgument, "negative raster dimension");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> pixels_;
};

using RGBImage = Raster<Rgb>;
/// Real-valued intensities; every stage of the pipeline exchanges these.
using GrayImage = Raster<float>;
/// 0 = false, anything else = true. Producers only ever write 0 or 1.
using BinaryMask = Raster<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::DimensionMismatch, what);
  }
}

/// Pixelwise 1 - v. Rejects values outside [0, 1].
GrayImage invert(const GrayImage& img);

/// Affine map sending the min/max over `region` to 0/1; pixels outside the
/// region use the same map and are clamped. A flat region yields all zeros.
GrayImage normalize01(const GrayImage& img, const BinaryMask& region);

std::size_t count_true(const BinaryMask& mask) noexcept;

}  // namespace vesseltrace
