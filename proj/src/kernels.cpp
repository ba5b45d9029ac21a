#include "roughcalc/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace roughcalc::kernels {

#if defined(ROUGHCALC_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

const KernelTable* avx2_table() {
#if defined(ROUGHCALC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& select(std::string_view request) {
  if (request.empty() || request == "auto") {
    if (const KernelTable* simd = avx2_table()) return *simd;
    return scalar_table();
  }
  if (request == "scalar") return scalar_table();
  if (request == "avx2") {
    if (const KernelTable* simd = avx2_table()) return *simd;
    throw std::runtime_error("ROUGHCALC_SIMD=avx2 requested but AVX2 is unavailable");
  }
  throw std::invalid_argument("unknown ROUGHCALC_SIMD value '" + std::string(request) + "'");
}

const KernelTable& choose_from_environment() {
  const char* env = std::getenv("ROUGHCALC_SIMD");
  return select(env ? std::string_view(env) : std::string_view());
}

}  // namespace roughcalc::kernels
