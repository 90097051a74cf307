// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "ergmbf/kernels.hpp"

namespace ergmbf::kernels {
namespace {

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_avx2(const double* a, const double* b, const double* w,
                         std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(w + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i] * w[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void affine_sign_masks_avx2(const double* b, const double* offset,
                            std::size_t rows, std::size_t cols, const double* z,
                            std::size_t stride, std::size_t n,
                            std::uint64_t* plus, std::uint64_t* minus) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t d = 0;
  for (; d + 4 <= n; d += 4) {
    std::uint64_t mp[4] = {0, 0, 0, 0};
    std::uint64_t mm[4] = {0, 0, 0, 0};
    for (std::size_t r = 0; r < rows; ++r) {
      __m256d lin = zero;
      const double* br = b + r * cols;
      for (std::size_t k = 0; k < cols; ++k) {
        lin = _mm256_fmadd_pd(_mm256_set1_pd(br[k]), _mm256_loadu_pd(z + k * stride + d), lin);
      }
      const __m256d off = _mm256_set1_pd(offset[r]);
      const int bits_p = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_add_pd(off, lin), zero, _CMP_GT_OQ));
      const int bits_m = _mm256_movemask_pd(_mm256_cmp_pd(_mm256_sub_pd(off, lin), zero, _CMP_GT_OQ));
      const std::uint64_t bit = std::uint64_t{1} << r;
      for (int l = 0; l < 4; ++l) {
        if (bits_p & (1 << l)) mp[l] |= bit;
        if (bits_m & (1 << l)) mm[l] |= bit;
      }
    }
    for (int l = 0; l < 4; ++l) {
      plus[d + l] = mp[l];
      minus[d + l] = mm[l];
    }
  }
  if (d < n) {
    scalar_table().affine_sign_masks(b, offset, rows, cols, z + d, stride, n - d,
                                     plus + d, minus + d);
  }
}

}  // namespace

const KernelTable& avx2_table_unchecked() {
  static const KernelTable table{"avx2", dot_avx2, weighted_dot_avx2, axpy_avx2,
                                 affine_sign_masks_avx2};
  return table;
}

}  // namespace ergmbf::kernels
