#include "hjb/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace hjb::kernels {

#if defined(HJB_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_table() {
#if defined(HJB_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  return out;
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("HJB_SIMD");
    const std::string_view want = env ? env : "auto";
    if (want == "scalar") return scalar_table();
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace hjb::kernels
