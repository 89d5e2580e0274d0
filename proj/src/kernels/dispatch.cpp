#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lsv/kernels/kernels.hpp"

namespace lsv::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("LSV_KERNEL")) {
    if (auto b = parse_backend(env); b && available(*b)) return *b;
  }
  return best_backend();
}

std::atomic<int>& selected() {
  static std::atomic<int> b{static_cast<int>(initial_backend())};
  return b;
}

}  // namespace

bool available(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#ifdef LSV_HAVE_AVX2_KERNELS
      return cpu_has_avx2();
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (!available(b)) {
    throw std::runtime_error("kernel backend " + std::string(backend_name(b)) + " unavailable");
  }
#ifdef LSV_HAVE_AVX2_KERNELS
  if (b == Backend::Avx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

Backend best_backend() noexcept { return available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar; }

Backend active_backend() noexcept { return static_cast<Backend>(selected().load(std::memory_order_relaxed)); }

const KernelTable& active() noexcept {
#ifdef LSV_HAVE_AVX2_KERNELS
  if (active_backend() == Backend::Avx2) return avx2::kTable;
#endif
  return scalar::kTable;
}

void set_backend(Backend b) {
  if (!available(b)) {
    throw std::runtime_error("kernel backend " + std::string(backend_name(b)) + " unavailable");
  }
  selected().store(static_cast<int>(b), std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) noexcept { return b == Backend::Avx2 ? "avx2" : "scalar"; }

std::optional<Backend> parse_backend(std::string_view s) noexcept {
  if (s == "scalar") return Backend::Scalar;
  if (s == "avx2") return Backend::Avx2;
  return std::nullopt;
}

}  // namespace lsv::kernels
