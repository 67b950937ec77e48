#include <atomic>
#include <cstdlib>
#include <string>

#include "vesseltrace/error.hpp"
#include "vesseltrace/simd.hpp"

namespace vesseltrace::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(VESSELTRACE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(VESSELTRACE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return &detail::scalar_table();
    case Isa::Avx2:
#if defined(VESSELTRACE_HAVE_AVX2)
      return &detail::avx2_table();
#else
      return nullptr;
#endif
    case Isa::Neon:
#if defined(VESSELTRACE_HAVE_NEON)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("VESSELTRACE_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == to_string(isa) && cpu_has(isa)) {
        return table_for(isa);
      }
    }
  }
  for (Isa isa : {Isa::Avx2, Isa::Neon}) {
    if (cpu_has(isa)) {
      return table_for(isa);
    }
  }
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& active() noexcept {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& kernels() noexcept { return *active().load(std::memory_order_acquire); }

Isa active_isa() noexcept { return kernels().isa; }

bool isa_supported(Isa isa) noexcept { return cpu_has(isa) && table_for(isa) != nullptr; }

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(ErrorKind::InvalidArgument, std::string("ISA not available: ") + std::string(to_string(isa)));
  }
  return *table_for(isa);
}

void select_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_release); }

}  // namespace vesseltrace::simd
