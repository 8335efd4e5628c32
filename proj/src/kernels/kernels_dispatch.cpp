#include <atomic>
#include <cstdlib>
#include <string>

#include "ucca/kernels.hpp"

namespace ucca::kernels {

#if defined(UCCA_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

namespace {

bool cpu_has_avx2() {
#if defined(UCCA_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best() {
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

const KernelTable* initial() {
  if (const char* env = std::getenv("UCCA_KERNELS")) {
    std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && avx2_kernels()) return avx2_kernels();
  }
  return best();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial()};
  return table;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(UCCA_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
  const KernelTable* t = nullptr;
  if (name == "scalar") {
    t = &scalar_kernels();
  } else if (name == "avx2") {
    t = avx2_kernels();
  } else if (name == "auto") {
    t = best();
  }
  if (!t) return false;
  current().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace ucca::kernels
