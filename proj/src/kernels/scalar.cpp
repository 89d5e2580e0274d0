#include <cmath>

#include "lsv/kernels/kernels.hpp"
#include "lsv/maps.hpp"

namespace lsv::kernels::scalar {

namespace {

void step_uniform(double* x, std::size_t n, double alpha) {
  for (std::size_t i = 0; i < n; ++i) x[i] = lsv::detail::step(alpha, x[i]);
}

void step_lanes(double* x, const double* alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = lsv::detail::step(alpha[i], x[i]);
}

void stencil_apply(const StencilView& p, const double* f, double* out) {
  for (std::size_t i = 0; i < p.n; ++i) {
    const double* fl = f + p.base_left[i];
    const double* fr = f + p.base_right[i];
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) acc = std::fma(p.wl[a][i], fl[a], acc);
    for (int a = 0; a < 4; ++a) acc = std::fma(p.wr[a][i], fr[a], acc);
    out[i] = acc;
  }
}

}  // namespace

const KernelTable kTable{"scalar", &step_uniform, &step_lanes, &stencil_apply};

}  // namespace lsv::kernels::scalar
