#include <cstdlib>
#include <string>

#include "fftlr/simd/kernels.hpp"

namespace fftlr::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelSet& select() {
  const char* forced = std::getenv("FFTLR_ISA");
  if (forced != nullptr && std::string(forced) == "scalar") return scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return avx2_kernels();
#endif
  return scalar_kernels();
}

}  // namespace

std::vector<const KernelSet*> available_kernels() {
  std::vector<const KernelSet*> out{&scalar_kernels()};
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) out.push_back(&avx2_kernels());
#endif
  return out;
}

const KernelSet& kernels() {
  static const KernelSet& chosen = select();
  return chosen;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace fftlr::simd
