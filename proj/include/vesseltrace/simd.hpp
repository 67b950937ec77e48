#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "vesseltrace/kernel_table.hpp"

namespace vesseltrace::simd {

std::string_view to_string(Isa isa) noexcept;

/// Table used by the library. Chosen once from CPU features; the
/// VESSELTRACE_SIMD environment variable (scalar|avx2|neon) overrides.
const KernelTable& kernels() noexcept;

Isa active_isa() noexcept;
bool isa_supported(Isa isa) noexcept;
std::vector<Isa> supported_isas();
const KernelTable& kernels_for(Isa isa);

/// Switch the library-wide table; throws if the CPU lacks the ISA.
void select_isa(Isa isa);

inline void accumulate(std::span<float> dst, std::span<const float> src, float w) noexcept {
  kernels().accumulate(dst.data(), src.data(), w, dst.size());
}
inline void max_scaled(std::span<float> dst, std::span<const float> src, float w) noexcept {
  kernels().max_scaled(dst.data(), src.data(), w, dst.size());
}
inline void min_into(std::span<float> dst, std::span<const float> src) noexcept {
  kernels().min_into(dst.data(), src.data(), dst.size());
}
inline void max_into(std::span<float> dst, std::span<const float> src) noexcept {
  kernels().max_into(dst.data(), src.data(), dst.size());
}

}  // namespace vesseltrace::simd
