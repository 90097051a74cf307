#include <cstdlib>
#include <string_view>

#include "ergmbf/kernels.hpp"

namespace ergmbf::kernels {

#if defined(ERGMBF_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

const KernelTable* avx2_table() {
#if defined(ERGMBF_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* force = std::getenv("ERGMBF_FORCE_SCALAR");
    if (force != nullptr && std::string_view(force) != "0") return scalar_table();
    const KernelTable* simd = avx2_table();
    return simd != nullptr ? *simd : scalar_table();
  }();
  return table;
}

}  // namespace ergmbf::kernels
