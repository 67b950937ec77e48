#include "vesseltrace/kernel_table.hpp"

namespace vesseltrace::simd::detail {
namespace {

// The SIMD variants reproduce these expressions lane by lane, including the
// operand order of min/max, so NaN-free inputs give identical bits.

void accumulate(float* dst, const float* src, float w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] + p;
  }
}

void max_scaled(float* dst, const float* src, float w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] > p ? dst[i] : p;
  }
}

void min_into(float* dst, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = dst[i] < src[i] ? dst[i] : src[i];
  }
}

void max_into(float* dst, const float* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = dst[i] > src[i] ? dst[i] : src[i];
  }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::Scalar, accumulate, max_scaled, min_into, max_into};
  return table;
}

}  // namespace vesseltrace::simd::detail
