#pragma once

// Plain declarations only: this header is also compiled with ISA-specific
// flags, so it must not define inline functions.

#include <cstddef>

namespace vesseltrace::simd {

enum class Isa { Scalar, Avx2, Neon };

// Row kernels behind every hot loop. Each variant must produce bit-identical
// results to the scalar one: no FMA, no reassociation, lane-wise only.
struct KernelTable {
  Isa isa;
  /// dst[i] += w * src[i]
  void (*accumulate)(float* dst, const float* src, float w, std::size_t n);
  /// dst[i] = max(dst[i], w * src[i])
  void (*max_scaled)(float* dst, const float* src, float w, std::size_t n);
  /// dst[i] = min(dst[i], src[i])
  void (*min_into)(float* dst, const float* src, std::size_t n);
  /// dst[i] = max(dst[i], src[i])
  void (*max_into)(float* dst, const float* src, std::size_t n);
};

namespace detail {
const KernelTable& scalar_table() noexcept;
#if defined(VESSELTRACE_HAVE_AVX2)
const KernelTable& avx2_table() noexcept;
#endif
#if defined(VESSELTRACE_HAVE_NEON)
const KernelTable& neon_table() noexcept;
#endif
}  // namespace detail

}  // namespace vesseltrace::simd
