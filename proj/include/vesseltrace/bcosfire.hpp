#pragma once

#include <span>
#include <vector>

#include "vesseltrace/raster.hpp"

namespace vesseltrace {

// B-COSFIRE bar detector.
//
// A filter is a set of DoG probes (sigma, rho, phi) placed at polar positions
// around a support center. Its response at a pixel is the weighted geometric
// mean of the rectified DoG responses read at those positions, each first
// max-blurred by a Gaussian whose width grows with rho. Rotating every phi by
// psi yields the detector for another orientation; the final response is the
// pixelwise maximum over orientations.
//
// Angles run counterclockwise from +x as seen on screen. With y pointing down
// the probe at (rho, phi) therefore sits at column offset rho*cos(phi) and
// row offset -rho*sin(phi).

struct FilterTuple {
  double sigma = 0.0;  ///< DoG scale, > 0
  double rho = 0.0;    ///< radial distance of the probe, >= 0
  double phi = 0.0;    ///< polar angle in [0, 2*pi)

  friend bool operator==(const FilterTuple&, const FilterTuple&) = default;
};

using TupleSet = std::vector<FilterTuple>;

enum class DogPolarity { CenterOn, CenterOff };

struct BCosfireConfig {
  double sigma = 2.4;
  std::vector<double> rho_list{0, 2, 4, 6, 8};
  // Literature DRIVE values 3 and 0.7, applied at the 1/6 scale of the
  // reference B-COSFIRE implementation.
  double sigma0 = 0.5;
  double alpha = 0.7 / 6.0;
  double t = 0.0;
  int n_orientations = 12;
  /// Exponent of rho in the weight exp(-rho^e / (2 sigma_hat^2)); 1 or 2.
  int weight_exponent = 1;
  DogPolarity dog_polarity = DogPolarity::CenterOn;
  double dog_kernel_radius_factor = 3.0;

  void validate() const;
  friend bool operator==(const BCosfireConfig&, const BCosfireConfig&) = default;
};

/// Square (2h+1)^2 kernel, h = ceil(radius_factor * sigma), row-major.
struct Kernel2D {
  int half_width = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    const int n = 2 * half_width + 1;
    return values[static_cast<std::size_t>((y + half_width) * n + (x + half_width))];
  }
};

/// G_{sigma/2} - G_sigma for center-on, negated for center-off. Each Gaussian
/// is exp(-(x^2+y^2)/(2 s^2)) scaled to unit sum over the kernel support, so
/// the kernel sums to zero; for s >= 1 this is within a few percent of the
/// continuous 1/(2 pi s^2) scaling.
Kernel2D dog_kernel(double sigma, double radius_factor, DogPolarity polarity);

/// max(0, img (*) DoG_sigma), correlation with zero padding.
GrayImage dog_response(const GrayImage& img, double sigma, const BCosfireConfig& cfg);

/// Vertical-bar prototype: (sigma, 0, 0) for rho = 0 and (sigma, rho, pi/2),
/// (sigma, rho, 3pi/2) for every rho > 0.
TupleSet line_prototype_tuples(const BCosfireConfig& cfg);

/// Blur sigma' = sigma0 + alpha * rho for a tuple.
double blur_sigma(const FilterTuple& tuple, const BCosfireConfig& cfg) noexcept;

/// Integer (column, row) offset at which the tuple's probe is read; the shift
/// vector is rounded to the nearest pixel.
struct PixelOffset {
  int dx;
  int dy;
};
PixelOffset probe_offset(const FilterTuple& tuple) noexcept;

/// s(x, y) = max over |x'|,|y'| <= ceil(3 sigma') of
///           c(x + dx - x', y + dy - y') * exp(-(x'^2 + y'^2) / (2 sigma'^2)),
/// with (dx, dy) = probe_offset(tuple) and zero outside the raster.
GrayImage blur_shift(const GrayImage& c, const FilterTuple& tuple, const BCosfireConfig& cfg);

/// Per-tuple weights exp(-rho^e / (2 sigma_hat^2)), sigma_hat = max rho / 3
/// (1 when every rho is 0).
std::vector<double> tuple_weights(const TupleSet& tuples, int weight_exponent);

/// Weighted geometric mean of the blurred-shifted responses, then values below
/// t * (global max) zeroed.
GrayImage combine(const TupleSet& tuples, std::span<const GrayImage> shifted, const BCosfireConfig& cfg);

/// Adds psi to every phi, wrapped to [0, 2*pi).
TupleSet rotate_tuples(const TupleSet& tuples, double psi);

/// Orientation angles k * pi / n_orientations.
std::vector<double> orientations(const BCosfireConfig& cfg);

/// Response for one rotation psi of the prototype (combine() output).
GrayImage respond_single(const GrayImage& img, const BCosfireConfig& cfg, double psi);

/// Max over all orientations, rescaled so the global max is 1 (all zeros
/// stays all zeros).
GrayImage respond(const GrayImage& img, const BCosfireConfig& cfg);

}  // namespace vesseltrace
