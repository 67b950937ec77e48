#include "vesseltrace/bcosfire.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "vesseltrace/filtering.hpp"
#include "vesseltrace/simd.hpp"

namespace vesseltrace {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int dog_half_width(double sigma, double radius_factor) {
  return static_cast<int>(std::ceil(radius_factor * sigma));
}

int blur_half_width(double sigma_prime) { return static_cast<int>(std::ceil(3.0 * sigma_prime)); }

Taps blur_taps(double sigma_prime) {
  if (sigma_prime <= 0.0) return Taps{1.0f};
  return gaussian_taps(sigma_prime, blur_half_width(sigma_prime), TapScale::Peak);
}

void zero_below_fraction_of_max(GrayImage& img, double t) {
  if (t <= 0.0) return;
  float peak = 0.0f;
  for (float v : img.pixels()) peak = std::max(peak, v);
  const double cut = t * peak;
  for (float& v : img.pixels()) {
    if (v < cut) v = 0.0f;
  }
}

}  // namespace

void BCosfireConfig::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorKind::OutOfRange, "filter.sigma must be > 0");
  if (rho_list.empty()) throw Error(ErrorKind::OutOfRange, "filter.rho_list must not be empty");
  bool has_center = false;
  for (double r : rho_list) {
    if (!(r >= 0.0)) throw Error(ErrorKind::OutOfRange, "filter.rho_list entries must be >= 0");
    has_center = has_center || r == 0.0;
  }
  if (!has_center) throw Error(ErrorKind::OutOfRange, "filter.rho_list must contain 0");
  if (!(sigma0 >= 0.0)) throw Error(ErrorKind::OutOfRange, "filter.sigma0 must be >= 0");
  if (!(alpha >= 0.0)) throw Error(ErrorKind::OutOfRange, "filter.alpha must be >= 0");
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::OutOfRange, "filter.t must lie in [0, 1]");
  if (n_orientations < 1) throw Error(ErrorKind::OutOfRange, "filter.n_orientations must be >= 1");
  if (weight_exponent != 1 && weight_exponent != 2) {
    throw Error(ErrorKind::OutOfRange, "filter.weight_exponent must be 1 or 2");
  }
  if (!(dog_kernel_radius_factor > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "filter.dog_kernel_radius_factor must be > 0");
  }
}

Kernel2D dog_kernel(double sigma, double radius_factor, DogPolarity polarity) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "dog_kernel: sigma must be > 0");
  Kernel2D k;
  k.half_width = dog_half_width(sigma, radius_factor);
  const int n = 2 * k.half_width + 1;
  k.values.resize(static_cast<std::size_t>(n) * n);
  const double sign = polarity == DogPolarity::CenterOn ? 1.0 : -1.0;
  // Each Gaussian is scaled to unit mass on the sampled support rather than
  // by 1/(2 pi s^2): undersampling (small s) and truncation (large s) would
  // otherwise leave the kernel with a DC response.
  auto unit_sum = [&](double s) {
    std::vector<double> g(static_cast<std::size_t>(n));
    double sum = 0.0;
    for (int x = -k.half_width; x <= k.half_width; ++x) {
      g[static_cast<std::size_t>(x + k.half_width)] = std::exp(-(static_cast<double>(x) * x) / (2.0 * s * s));
      sum += g[static_cast<std::size_t>(x + k.half_width)];
    }
    for (double& v : g) v /= sum;
    return g;
  };
  const auto inner = unit_sum(0.5 * sigma);
  const auto outer = unit_sum(sigma);
  for (std::size_t y = 0; y < static_cast<std::size_t>(n); ++y) {
    for (std::size_t x = 0; x < static_cast<std::size_t>(n); ++x) {
      k.values[y * static_cast<std::size_t>(n) + x] = sign * (inner[y] * inner[x] - outer[y] * outer[x]);
    }
  }
  return k;
}

GrayImage dog_response(const GrayImage& img, double sigma, const BCosfireConfig& cfg) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidArgument, "dog_response: sigma must be > 0");
  // Each Gaussian of the DoG is separable on the square support, so the 2-D
  // correlation splits into two separable passes.
  const int h = dog_half_width(sigma, cfg.dog_kernel_radius_factor);
  const Taps narrow = gaussian_taps(0.5 * sigma, h, TapScale::UnitSum);
  const Taps wide = gaussian_taps(sigma, h, TapScale::UnitSum);
  const GrayImage a = correlate_separable(img, narrow, narrow);
  const GrayImage b = correlate_separable(img, wide, wide);
  GrayImage out(img.width(), img.height());
  auto pa = a.pixels();
  auto pb = b.pixels();
  auto dst = out.pixels();
  const bool center_on = cfg.dog_polarity == DogPolarity::CenterOn;
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const float v = center_on ? pa[i] - pb[i] : pb[i] - pa[i];
    dst[i] = v > 0.0f ? v : 0.0f;
  }
  return out;
}

TupleSet line_prototype_tuples(const BCosfireConfig& cfg) {
  if (cfg.rho_list.empty()) throw Error(ErrorKind::InvalidArgument, "rho_list must not be empty");
  std::vector<double> rhos = cfg.rho_list;
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end()), rhos.end());
  TupleSet s;
  for (double rho : rhos) {
    if (rho == 0.0) {
      s.push_back({cfg.sigma, 0.0, 0.0});
    } else {
      s.push_back({cfg.sigma, rho, 0.5 * std::numbers::pi});
      s.push_back({cfg.sigma, rho, 1.5 * std::numbers::pi});
    }
  }
  return s;
}

double blur_sigma(const FilterTuple& tuple, const BCosfireConfig& cfg) noexcept {
  return cfg.sigma0 + cfg.alpha * tuple.rho;
}

PixelOffset probe_offset(const FilterTuple& tuple) noexcept {
  return {static_cast<int>(std::lround(tuple.rho * std::cos(tuple.phi))),
          static_cast<int>(std::lround(-tuple.rho * std::sin(tuple.phi)))};
}

GrayImage blur_shift(const GrayImage& c, const FilterTuple& tuple, const BCosfireConfig& cfg) {
  const PixelOffset off = probe_offset(tuple);
  const int margin = std::max(std::abs(off.dx), std::abs(off.dy));
  const GrayImage blurred = weighted_max_separable(c, blur_taps(blur_sigma(tuple, cfg)), margin);
  GrayImage out(c.width(), c.height());
  for (int y = 0; y < c.height(); ++y) {
    const auto src = blurred.row(y + off.dy + margin).subspan(static_cast<std::size_t>(off.dx + margin),
                                                               static_cast<std::size_t>(c.width()));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

std::vector<double> tuple_weights(const TupleSet& tuples, int weight_exponent) {
  double max_rho = 0.0;
  for (const auto& tu : tuples) max_rho = std::max(max_rho, tu.rho);
  const double sigma_hat = max_rho > 0.0 ? max_rho / 3.0 : 1.0;
  std::vector<double> w;
  w.reserve(tuples.size());
  for (const auto& tu : tuples) {
    w.push_back(std::exp(-std::pow(tu.rho, weight_exponent) / (2.0 * sigma_hat * sigma_hat)));
  }
  return w;
}

GrayImage combine(const TupleSet& tuples, std::span<const GrayImage> shifted, const BCosfireConfig& cfg) {
  if (tuples.empty() || shifted.size() != tuples.size()) {
    throw Error(ErrorKind::InvalidArgument, "combine: need one response per tuple");
  }
  for (const auto& s : shifted) require_same_shape(s, shifted.front(), "combine: responses differ in size");
  const std::vector<double> w = tuple_weights(tuples, cfg.weight_exponent);
  double total = 0.0;
  for (double wi : w) total += wi;

  GrayImage out(shifted.front().width(), shifted.front().height());
  auto dst = out.pixels();
  for (std::size_t p = 0; p < dst.size(); ++p) {
    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t i = 0; i < shifted.size(); ++i) {
      const float v = shifted[i].pixels()[p];
      if (v <= 0.0f) {
        zero = true;
        break;
      }
      log_sum += w[i] * std::log(static_cast<double>(v));
    }
    dst[p] = zero ? 0.0f : static_cast<float>(std::exp(log_sum / total));
  }
  zero_below_fraction_of_max(out, cfg.t);
  return out;
}

TupleSet rotate_tuples(const TupleSet& tuples, double psi) {
  TupleSet out = tuples;
  for (auto& tu : out) {
    double phi = std::fmod(tu.phi + psi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    if (phi >= kTwoPi) phi = 0.0;
    tu.phi = phi;
  }
  return out;
}

std::vector<double> orientations(const BCosfireConfig& cfg) {
  std::vector<double> psi;
  for (int k = 0; k < cfg.n_orientations; ++k) psi.push_back(k * std::numbers::pi / cfg.n_orientations);
  return psi;
}

namespace {

// Everything that depends on (sigma, rho) but not on the probe angle: the
// rectified DoG response and its max-blur, stored as log so the geometric
// mean becomes a weighted sum of shifted rows.
class ResponseBank {
 public:
  ResponseBank(const GrayImage& img, const TupleSet& prototype, const BCosfireConfig& cfg)
      : width_(img.width()), height_(img.height()) {
    for (const auto& tu : prototype) margin_ = std::max(margin_, static_cast<int>(std::ceil(tu.rho)) + 1);
    std::map<double, GrayImage> dog;
    for (const auto& tu : prototype) {
      if (!dog.contains(tu.sigma)) dog.emplace(tu.sigma, dog_response(img, tu.sigma, cfg));
      const Key key{tu.sigma, tu.rho};
      if (log_blurred_.contains(key)) continue;
      GrayImage b = weighted_max_separable(dog.at(tu.sigma), blur_taps(blur_sigma(tu, cfg)), margin_);
      for (float& v : b.pixels()) v = static_cast<float>(std::log(static_cast<double>(v)));
      log_blurred_.emplace(key, std::move(b));
    }
  }

  /// Row of log s for `tuple` at image row y, width() entries.
  const float* row(const FilterTuple& tuple, int y) const {
    const PixelOffset off = probe_offset(tuple);
    const GrayImage& b = log_blurred_.at(Key{tuple.sigma, tuple.rho});
    return b.row(y + off.dy + margin_).data() + off.dx + margin_;
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

 private:
  struct Key {
    double sigma;
    double rho;
    auto operator<=>(const Key&) const = default;
  };
  int width_;
  int height_;
  int margin_ = 1;
  std::map<Key, GrayImage> log_blurred_;
};

GrayImage oriented_response(const ResponseBank& bank, const TupleSet& rotated, const std::vector<double>& weights,
                            const BCosfireConfig& cfg) {
  double total = 0.0;
  for (double w : weights) total += w;
  const auto& k = simd::kernels();
  GrayImage acc(bank.width(), bank.height(), 0.0f);
  const auto n = static_cast<std::size_t>(bank.width());
  for (int y = 0; y < bank.height(); ++y) {
    float* dst = acc.row(y).data();
    for (std::size_t i = 0; i < rotated.size(); ++i) {
      k.accumulate(dst, bank.row(rotated[i], y), static_cast<float>(weights[i]), n);
    }
  }
  const double inv_total = 1.0 / total;
  for (float& v : acc.pixels()) {
    // exp(-inf) == 0 carries the annihilation of any zero factor.
    v = static_cast<float>(std::exp(static_cast<double>(v) * inv_total));
  }
  zero_below_fraction_of_max(acc, cfg.t);
  return acc;
}

}  // namespace

GrayImage respond_single(const GrayImage& img, const BCosfireConfig& cfg, double psi) {
  cfg.validate();
  const TupleSet prototype = line_prototype_tuples(cfg);
  const ResponseBank bank(img, prototype, cfg);
  return oriented_response(bank, rotate_tuples(prototype, psi), tuple_weights(prototype, cfg.weight_exponent), cfg);
}

GrayImage respond(const GrayImage& img, const BCosfireConfig& cfg) {
  cfg.validate();
  const TupleSet prototype = line_prototype_tuples(cfg);
  const ResponseBank bank(img, prototype, cfg);
  const std::vector<double> weights = tuple_weights(prototype, cfg.weight_exponent);
  const auto& k = simd::kernels();

  GrayImage out(img.width(), img.height(), 0.0f);
  for (double psi : orientations(cfg)) {
    const GrayImage r = oriented_response(bank, rotate_tuples(prototype, psi), weights, cfg);
    k.max_into(out.pixels().data(), r.pixels().data(), out.size());
  }
  float peak = 0.0f;
  for (float v : out.pixels()) peak = std::max(peak, v);
  if (peak > 0.0f) {
    const double inv = 1.0 / peak;
    for (float& v : out.pixels()) v = static_cast<float>(std::min(1.0, v * inv));
  }
  return out;
}

}  // namespace vesseltrace
