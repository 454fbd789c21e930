#include "qnet/kernels.hpp"

namespace qnet::kernels {

bool avx2_available() {
#if defined(QNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Backend* best_backend() {
#if defined(QNET_HAVE_AVX2)
  if (avx2_available()) return &avx2_backend();
#endif
  return &scalar_backend();
}

const Backend*& active_slot() {
  static const Backend* b = best_backend();
  return b;
}

} // namespace

const Backend& active() { return *active_slot(); }

void force_backend(const Backend& b) { active_slot() = &b; }

void reset_backend() { active_slot() = best_backend(); }

} // namespace qnet::kernels
