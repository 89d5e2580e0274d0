#include <immintrin.h>

#include <cmath>

#include "lsv/kernels/kernels.hpp"

// glibc libmvec, 4-lane AVX2 variant of pow.
extern "C" __m256d _ZGVdN4vv_pow(__m256d x, __m256d y);

namespace lsv::kernels::avx2 {

namespace {

inline __m256d step4(__m256d x, __m256d alpha) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d tx = _mm256_mul_pd(two, x);
  __m256d p = _ZGVdN4vv_pow(tx, alpha);
  __m256d left = _mm256_fmadd_pd(x, p, x);
  __m256d right = _mm256_sub_pd(tx, one);
  __m256d is_left = _mm256_cmp_pd(x, half, _CMP_LE_OQ);
  __m256d y = _mm256_blendv_pd(right, left, is_left);
  y = _mm256_max_pd(y, _mm256_setzero_pd());
  return _mm256_min_pd(y, one);
}

void step_uniform(double* x, std::size_t n, double alpha) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, step4(_mm256_loadu_pd(x + i), a));
  if (i < n) {
    alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
    _mm256_store_pd(buf, step4(_mm256_load_pd(buf), a));
    for (std::size_t j = i; j < n; ++j) x[j] = buf[j - i];
  }
}

void step_lanes(double* x, const double* alpha, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, step4(_mm256_loadu_pd(x + i), _mm256_loadu_pd(alpha + i)));
  }
  if (i < n) {
    alignas(32) double bx[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double ba[4] = {0.5, 0.5, 0.5, 0.5};
    for (std::size_t j = i; j < n; ++j) {
      bx[j - i] = x[j];
      ba[j - i] = alpha[j];
    }
    _mm256_store_pd(bx, step4(_mm256_load_pd(bx), _mm256_load_pd(ba)));
    for (std::size_t j = i; j < n; ++j) x[j] = bx[j - i];
  }
}

void stencil_apply(const StencilView& p, const double* f, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= p.n; i += 4) {
    __m128i bl = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p.base_left + i));
    __m128i br = _mm_loadu_si128(reinterpret_cast<const __m128i*>(p.base_right + i));
    __m256d acc = _mm256_setzero_pd();
    for (int a = 0; a < 4; ++a) {
      __m256d g = _mm256_i32gather_pd(f + a, bl, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(p.wl[a] + i), g, acc);
    }
    for (int a = 0; a < 4; ++a) {
      __m256d g = _mm256_i32gather_pd(f + a, br, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(p.wr[a] + i), g, acc);
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < p.n; ++i) {
    const double* fl = f + p.base_left[i];
    const double* fr = f + p.base_right[i];
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) acc = std::fma(p.wl[a][i], fl[a], acc);
    for (int a = 0; a < 4; ++a) acc = std::fma(p.wr[a][i], fr[a], acc);
    out[i] = acc;
  }
}

}  // namespace

const KernelTable kTable{"avx2", &step_uniform, &step_lanes, &stencil_apply};

}  // namespace lsv::kernels::avx2
