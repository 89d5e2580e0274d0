#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace lsv::kernels {

enum class Backend { Scalar, Avx2 };

// Structure-of-arrays view of an 8-tap transfer stencil: out[i] is
//   sum_a wl[a][i] * f[base_left[i] + a] + sum_a wr[a][i] * f[base_right[i] + a]
// accumulated with fused multiply-adds in that order.
struct StencilView {
  std::size_t n = 0;
  const std::int32_t* base_left = nullptr;
  const std::int32_t* base_right = nullptr;
  const double* wl[4] = {};
  const double* wr[4] = {};
};

struct KernelTable {
  const char* name;
  // x[i] <- T_alpha(x[i])
  void (*step_uniform)(double* x, std::size_t n, double alpha);
  // x[i] <- T_{alpha[i]}(x[i])
  void (*step_lanes)(double* x, const double* alpha, std::size_t n);
  void (*stencil_apply)(const StencilView& plan, const double* f, double* out);
};

bool available(Backend b) noexcept;
const KernelTable& table(Backend b);

// Process-wide selection. Defaults to the best available backend unless the
// LSV_KERNEL environment variable names one ("scalar", "avx2").
Backend active_backend() noexcept;
const KernelTable& active() noexcept;
void set_backend(Backend b);
Backend best_backend() noexcept;

std::string_view backend_name(Backend b) noexcept;
std::optional<Backend> parse_backend(std::string_view s) noexcept;

namespace scalar {
extern const KernelTable kTable;
}
namespace avx2 {
extern const KernelTable kTable;
}

}  // namespace lsv::kernels
