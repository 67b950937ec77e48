// Compiled with -mavx2. Only reached after the dispatcher has checked CPUID.

#include <immintrin.h>

#include "vesseltrace/kernel_table.hpp"

namespace vesseltrace::simd::detail {
namespace {

constexpr std::size_t kLanes = 8;

void accumulate(float* dst, const float* src, float w, std::size_t n) {
  const __m256 vw = _mm256_set1_ps(w);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 p = _mm256_mul_ps(vw, _mm256_loadu_ps(src + i));
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(dst + i), p));
  }
  for (; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] + p;
  }
}

void max_scaled(float* dst, const float* src, float w, std::size_t n) {
  const __m256 vw = _mm256_set1_ps(w);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 p = _mm256_mul_ps(vw, _mm256_loadu_ps(src + i));
    _mm256_storeu_ps(dst + i, _mm256_max_ps(_mm256_loadu_ps(dst + i), p));
  }
  for (; i < n; ++i) {
    const float p = w * src[i];
    dst[i] = dst[i] > p ? dst[i] : p;
  }
}

void min_into(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(dst + i, _mm256_min_ps(_mm256_loadu_ps(dst + i), _mm256_loadu_ps(src + i)));
  }
  for (; i < n; ++i) {
    dst[i] = dst[i] < src[i] ? dst[i] : src[i];
  }
}

void max_into(float* dst, const float* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(dst + i, _mm256_max_ps(_mm256_loadu_ps(dst + i), _mm256_loadu_ps(src + i)));
  }
  for (; i < n; ++i) {
    dst[i] = dst[i] > src[i] ? dst[i] : src[i];
  }
}

}  // namespace

const KernelTable& avx2_table() noexcept {
  static const KernelTable table{Isa::Avx2, accumulate, max_scaled, min_into, max_into};
  return table;
}

}  // namespace vesseltrace::simd::detail
