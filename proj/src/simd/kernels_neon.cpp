// AArch64 NEON variant. vmaxq/vminq differ from the scalar ternary only on
// NaN and signed-zero ties, so the compare-and-select forms are used instead.

#include <arm_neon.h>

#include "vesseltrace/kernel_table.hpp"

namespace vesseltrace::simd::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline float32x4_t select_greater(float32x4_t a, float32x4_t b) {
  return vbslq_f32(vcgtq_f32(a, b), a, b);
}

inline float32x4_t select_less(float32x4_t a, float32x4_t b) {
  return vbslq_f32(vcltq_f32(a, b), a, b);
}

void accumulate(float* dst, const float* src, float w, std::size_t n) {
  const float32x4_t vw = vdupq_n_f32(w);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t p = vmulq_f32(vw, vld1q_f32(src + i));
    vst1q_f32(dst + i, vaddq_f32(vld1q_f32(dst + i), p));
  }
  for (; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] + p;
  }
}

void max_scaled(float* dst, const float* src, float w, std::size_t n) {
  const float32x4_t vw = vdupq_n_f32(w);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t p = vmulq_f32(vw, vld1q_f32(src + i));
    vst1q_f32(dst + i, select_greater(vld1q_f32(dst + i), p));
  }
  for (; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] > p ? dst[i] : p;
  }
}

void min_into(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f32(dst + i, select_less(vld1q_f32(dst + i), vld1q_f32(src + i)));
  }
  for (; i < n; ++i) {
    dst[i] = dst[i] < src[i] ? dst[i] : src[i];
  }
}

void max_into(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f32(dst + i, select_greater(vld1q_f32(dst + i), vld1q_f32(src + i)));
  }
  for (; i < n; ++i) {
    dst[i] = dst[i] > src[i] ? dst[i] : src[i];
  }
}

}  // namespace

const KernelTable& neon_table() noexcept {
  static const KernelTable table{Isa::Neon, accumulate, max_scaled, min_into, max_into};
  return table;
}

}  // namespace vesseltrace::simd::detail
