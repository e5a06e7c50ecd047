#include "lassoflow/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace lassoflow::kernels {

#if defined(LASSOFLOW_HAVE_AVX2)
const Ops* avx2_ops();
#endif
#if defined(LASSOFLOW_HAVE_NEON) && defined(__aarch64__)
const Ops* neon_ops();
#endif

const std::vector<const Ops*>& available() {
  static const std::vector<const Ops*> tables = [] {
    std::vector<const Ops*> v{&scalar()};
#if defined(LASSOFLOW_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
      v.push_back(avx2_ops());
#endif
#if defined(LASSOFLOW_HAVE_NEON) && defined(__aarch64__)
    v.push_back(neon_ops());  // ASIMD is mandatory on aarch64
#endif
    return v;
  }();
  return tables;
}

const Ops& active() {
  static const Ops* chosen = [] {
    const auto& tabs = available();
    if (const char* force = std::getenv("LASSOFLOW_KERNELS")) {
      for (const Ops* t : tabs)
        if (std::strcmp(t->name, force) == 0) return t;
      // unknown names fall back to the automatic choice
    }
    return tabs.back();
  }();
  return *chosen;
}

}  // namespace lassoflow::kernels
