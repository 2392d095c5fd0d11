#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ymflow/kernels.hpp"

namespace ymflow::kernels {
namespace {

Isa detect() {
  const char* env = std::getenv("YMFLOW_FORCE_SCALAR");
  if (env != nullptr && std::strcmp(env, "0") != 0 && env[0] != '\0') return Isa::Scalar;
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& selected() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return static_cast<Isa>(selected().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  selected().store(static_cast<int>(isa), std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

const KernelTable& active() {
  return active_isa() == Isa::Avx2 ? avx2_table() : scalar_table();
}

}  // namespace ymflow::kernels
